#include "infmmala/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "infmmala/errors.hpp"
#include "json.hpp"

namespace infmmala {

namespace {

using nlohmann::json;

ValidationError bad(const std::string& field, const std::string& what) {
  return ValidationError(field, what);
}

// Wraps a json object and tracks which keys were consumed, so typos in a
// config fail loudly instead of being ignored.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw bad(path_, "must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& get(const std::string& key) {
    seen_.push_back(key);
    if (!j_.contains(key)) throw bad(field(key), "is required");
    return j_.at(key);
  }

  const json* maybe(const std::string& key) {
    seen_.push_back(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) throw bad(field(key), "must be a number");
    return v.get<double>();
  }

  double positive(const std::string& key) {
    const double v = number(key);
    if (!std::isfinite(v) || v <= 0.0) {
      throw bad(field(key), "must be > 0, got " + std::to_string(v));
    }
    return v;
  }

  long long integer(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number_integer()) throw bad(field(key), "must be an integer");
    return v.get<long long>();
  }

  std::string text(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) throw bad(field(key), "must be a string");
    return v.get<std::string>();
  }

  Section section(const std::string& key) { return Section(get(key), field(key)); }

  void reject_unknown() const {
    for (const auto& item : j_.items()) {
      bool known = false;
      for (const auto& k : seen_) {
        if (k == item.key()) {
          known = true;
          break;
        }
      }
      if (!known) throw bad(field(item.key()), "is not a recognized key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

std::vector<double> parse_times(const json& v, const std::string& field) {
  std::vector<double> times;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw bad(field, "must contain only numbers");
      times.push_back(e.get<double>());
    }
  } else if (v.is_object()) {
    Section s(v, field);
    const double start = s.number("start");
    const double stop = s.number("stop");
    const double step = s.positive("step");
    s.reject_unknown();
    if (stop < start) throw bad(field, "has stop < start");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) times.push_back(start + static_cast<double>(i) * step);
  } else {
    throw bad(field, "must be an array of times or {start, stop, step}");
  }
  return times;
}

void require_on_grid(const GridSpec& grid, const std::vector<double>& times,
                     const std::string& field) {
  int prev = 0;
  for (double t : times) {
    int j = 0;
    try {
      j = grid_index_of_time(grid, t);
    } catch (const OffGridTime& e) {
      throw bad(field, e.what());
    }
    if (j <= prev) throw bad(field, "must be strictly increasing");
    prev = j;
  }
}

InitStrategy parse_init(const std::string& text, const std::string& field) {
  if (text == "prior") return InitStrategy::prior();
  if (text == "data_pinned") return InitStrategy::data_pinned();
  const std::string prefix = "flat_bridge(";
  if (text.rfind(prefix, 0) == 0 && text.back() == ')') {
    const std::string inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    double v = 0.0;
    const auto res = std::from_chars(inner.data(), inner.data() + inner.size(), v);
    if (res.ec == std::errc{} && res.ptr == inner.data() + inner.size() && std::isfinite(v)) {
      return InitStrategy::flat_bridge(v);
    }
  }
  throw bad(field, "must be prior, data_pinned or flat_bridge(<level>), got '" + text + "'");
}

GridSpec parse_grid(Section& root) {
  Section s = root.section("grid");
  GridSpec grid;
  grid.delta = s.positive("delta");
  grid.x_star = s.number("x_star");
  if (!std::isfinite(grid.x_star)) throw bad(s.field("x_star"), "must be finite");
  const bool has_n = s.has("N");
  const bool has_t = s.has("T");
  if (has_n == has_t) throw bad("grid", "needs exactly one of N and T");
  if (has_n) {
    const long long n = s.integer("N");
    if (n < 1 || n > 100'000'000) throw bad(s.field("N"), "must be in [1, 1e8]");
    grid.N = static_cast<int>(n);
  } else {
    const double horizon = s.positive("T");
    const double ratio = horizon / grid.delta;
    const auto n = static_cast<long long>(std::llround(ratio));
    if (n < 1 || n > 100'000'000 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
      throw bad(s.field("T"), "must be a multiple of delta, got " + std::to_string(horizon));
    }
    grid.N = static_cast<int>(n);
  }
  s.reject_unknown();
  return grid;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }

  Section root(doc, "");
  ExperimentConfig cfg;
  cfg.grid = parse_grid(root);

  {
    Section s = root.section("model");
    Section drift = s.section("drift");
    if (drift.text("name") != "affine") {
      throw bad("model.drift.name", "only 'affine' drifts are supported");
    }
    const double c0 = drift.number("c0");
    const double c1 = drift.number("c1");
    if (!std::isfinite(c0) || !std::isfinite(c1)) {
      throw bad("model.drift", "coefficients must be finite");
    }
    drift.reject_unknown();
    cfg.fns.drift = DriftFn::affine(c0, c1);
    try {
      cfg.fns.obs_map = ObsMap::by_name(s.text("obs_map"));
    } catch (const UnsupportedModel& e) {
      throw bad("model.obs_map", e.what());
    }
    cfg.sigma2 = s.positive("sigma2");
    s.reject_unknown();
  }

  {
    Section s = root.section("data");
    const std::string mode = s.text("mode");
    if (mode == "simulate") {
      cfg.data_mode = ExperimentConfig::DataMode::Simulate;
      cfg.obs_times = parse_times(s.get("obs_times"), "data.obs_times");
      if (cfg.obs_times.empty()) throw bad("data.obs_times", "must not be empty");
      require_on_grid(cfg.grid, cfg.obs_times, "data.obs_times");
    } else if (mode == "file") {
      cfg.data_mode = ExperimentConfig::DataMode::File;
      cfg.data_path = s.text("path");
      if (cfg.data_path.empty()) throw bad("data.path", "must not be empty");
    } else {
      throw bad("data.mode", "must be 'simulate' or 'file', got '" + mode + "'");
    }
    s.reject_unknown();
  }

  {
    Section s = root.section("sampler");
    try {
      cfg.algo = algo_from_name(s.text("algo"));
    } catch (const ValidationError& e) {
      throw bad("sampler.algo", e.what());
    }
    cfg.h = s.positive("h");
    cfg.iters = s.integer("iters");
    if (cfg.iters < 1) throw bad("sampler.iters", "must be >= 1");
    cfg.init = parse_init(s.text("init"), "sampler.init");
    if (const json* seed = s.maybe("seed")) {
      if (!seed->is_number_unsigned()) {
        throw bad("sampler.seed", "must be a non-negative integer");
      }
      cfg.seed = seed->get<std::uint64_t>();
    }
    s.reject_unknown();
  }

  if (const json* out = root.maybe("output")) {
    Section s(*out, "output");
    if (const json* dir = s.maybe("dir")) {
      if (!dir->is_string()) throw bad("output.dir", "must be a string");
      cfg.out_dir = dir->get<std::string>();
      if (cfg.out_dir.empty()) throw bad("output.dir", "must not be empty");
    }
    if (const json* times = s.maybe("trace_times")) {
      cfg.trace_times = parse_times(*times, "output.trace_times");
      require_on_grid(cfg.grid, cfg.trace_times, "output.trace_times");
    }
    s.reject_unknown();
  }
  root.reject_unknown();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError(path + ": read failed");
  return parse_config(text.str());
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.grid = GridSpec{10'000, 0.01, 2.0};
  cfg.fns.drift = DriftFn::affine(4.0, -1.0);
  cfg.fns.obs_map = ObsMap::power32();
  cfg.sigma2 = 0.1;
  cfg.data_mode = ExperimentConfig::DataMode::Simulate;
  for (int i = 1; i <= 100; ++i) cfg.obs_times.push_back(static_cast<double>(i));
  cfg.h = 1.0;
  cfg.seed = 0;
  cfg.out_dir = "out";
  if (name == "fig1") {
    cfg.algo = Algo::InfMmala;
    cfg.iters = 2000;
    cfg.init = InitStrategy::flat_bridge(2.0);
    cfg.trace_times = {37.0, 36.5};
  } else if (name == "fig2") {
    cfg.algo = Algo::InfMmala;
    cfg.iters = 1000;
    cfg.init = InitStrategy::data_pinned();
  } else if (name == "mesh") {
    cfg.algo = Algo::InfMmala;
    cfg.iters = 2000;
    cfg.init = InitStrategy::flat_bridge(2.0);
  } else {
    throw ValidationError("preset", "unknown preset '" + name + "' (expected fig1, fig2 or mesh)");
  }
  return cfg;
}

}  // namespace infmmala
