#include "infmmala/model.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "infmmala/errors.hpp"
#include "infmmala/rng.hpp"

namespace infmmala {

namespace {

std::string describe(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(std::string(what) + " must be finite, got " + describe(v));
  }
}

void validate_grid(const GridSpec& grid) {
  if (grid.N < 1) {
    throw Error("grid size N must be >= 1, got " + std::to_string(grid.N));
  }
  require_finite(grid.delta, "grid spacing delta");
  if (!(grid.delta > 0.0)) {
    throw Error("grid spacing delta must be > 0, got " + describe(grid.delta));
  }
  require_finite(grid.x_star, "origin x_star");
}

void validate_indices(const GridSpec& grid, std::span<const int> indices, const char* what) {
  int prev = 0;
  for (int j : indices) {
    if (j < 1 || j > grid.N) {
      throw IndexOutOfRange(std::string(what) + " index " + std::to_string(j) +
                            " outside grid range [1, " + std::to_string(grid.N) + "]");
    }
    if (j <= prev) {
      throw InvalidPins(std::string(what) + " indices must be strictly increasing, got " +
                        std::to_string(prev) + " then " + std::to_string(j));
    }
    prev = j;
  }
}

}  // namespace

int grid_index_of_time(const GridSpec& grid, double t) {
  validate_grid(grid);
  const double ratio = t / grid.delta;
  const long long j = std::llround(ratio);
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  if (j < 1 || j > grid.N || std::abs(static_cast<double>(j) * grid.delta - t) > tol) {
    throw OffGridTime("time " + describe(t) + " is not a grid point of [delta=" +
                      describe(grid.delta) + ", N=" + std::to_string(grid.N) + "]");
  }
  return static_cast<int>(j);
}

Path::Path(GridSpec g, std::vector<double> v) : grid(g), values(std::move(v)) {
  validate_grid(grid);
  if (static_cast<int>(values.size()) != grid.N) {
    throw DimensionMismatch("path has " + std::to_string(values.size()) +
                            " values for grid size " + std::to_string(grid.N));
  }
}

std::string DriftFn::name() const {
  std::ostringstream os;
  os << c0 << (c1 < 0.0 ? " - " : " + ") << std::abs(c1) << "*x";
  return os.str();
}

ObsMap ObsMap::by_name(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "power32") return power32();
  throw UnsupportedModel("unknown observation map '" + name + "'");
}

double ObsMap::value(double x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Power32:
      return std::copysign(std::pow(std::abs(x), 1.5), x);
    case Kind::Constant:
      return c_;
  }
  std::abort();
}

double ObsMap::deriv(double x) const {
  switch (kind_) {
    case Kind::Identity:
      return 1.0;
    case Kind::Power32:
      return 1.5 * std::sqrt(std::abs(x));
    case Kind::Constant:
      return 0.0;
  }
  std::abort();
}

double ObsMap::inverse(double y) const {
  switch (kind_) {
    case Kind::Identity:
      return y;
    case Kind::Power32:
      return std::copysign(std::pow(std::abs(y), 2.0 / 3.0), y);
    case Kind::Constant:
      throw NonInvertibleObsMap("constant observation map has no inverse");
  }
  std::abort();
}

std::string ObsMap::name() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::Power32:
      return "power32";
    case Kind::Constant:
      return "constant(" + describe(c_) + ")";
  }
  std::abort();
}

SymTridiag build_prior_precision(const GridSpec& grid) {
  validate_grid(grid);
  const auto n = static_cast<std::size_t>(grid.N);
  std::vector<double> diag(n, 2.0 / grid.delta);
  diag[n - 1] = 1.0 / grid.delta;
  std::vector<double> off(n - 1, -1.0 / grid.delta);
  return SymTridiag(std::move(diag), std::move(off));
}

DiffusionTarget::DiffusionTarget(GridSpec grid, ObservationSet obs, ModelFunctions fns)
    : grid_(grid), obs_(std::move(obs)), fns_(std::move(fns)) {
  validate_grid(grid_);
  if (obs_.indices.size() != obs_.values.size()) {
    throw DimensionMismatch("observation set has " + std::to_string(obs_.indices.size()) +
                            " indices but " + std::to_string(obs_.values.size()) + " values");
  }
  validate_indices(grid_, obs_.indices, "observation");
  require_finite(obs_.sigma2, "observation variance sigma2");
  if (!(obs_.sigma2 > 0.0)) {
    throw Error("observation variance sigma2 must be > 0, got " + describe(obs_.sigma2));
  }
  for (double y : obs_.values) require_finite(y, "observation value");
  prior_precision_ = build_prior_precision(grid_);
  lmu_.assign(static_cast<std::size_t>(grid_.N), 0.0);
  lmu_[0] = grid_.x_star / grid_.delta;
}

Potential phi(const DiffusionTarget& t, const Path& x) {
  if (!(x.grid == t.grid())) {
    throw DimensionMismatch("path grid does not match target grid");
  }
  const auto& fns = t.fns();
  Potential p;
  for (int i = 0; i < t.obs().count(); ++i) {
    const double r = t.obs().values[static_cast<std::size_t>(i)] -
                     fns.obs_map.value(x.at(t.obs().indices[static_cast<std::size_t>(i)]));
    p.obs += r * r;
  }
  p.obs /= 2.0 * t.obs().sigma2;
  const double delta = t.grid().delta;
  for (int j = 1; j <= t.grid().N; ++j) {
    const double a = fns.drift(x.at(j - 1));
    p.girsanov += -a * (x.at(j) - x.at(j - 1)) + 0.5 * a * a * delta;
  }
  p.total = p.obs + p.girsanov;
  return p;
}

std::vector<double> grad_phi(const DiffusionTarget& t, const Path& x) {
  if (!(x.grid == t.grid())) {
    throw DimensionMismatch("path grid does not match target grid");
  }
  const auto& fns = t.fns();
  const int N = t.grid().N;
  const double delta = t.grid().delta;
  std::vector<double> g(static_cast<std::size_t>(N), 0.0);
  // d/dx_k of the Girsanov sums: x_k enters increment k as right endpoint and
  // increment k+1 (when k < N) through the drift at its left endpoint.
  for (int k = 1; k <= N; ++k) {
    double v = -fns.drift(x.at(k - 1));
    if (k < N) {
      const double a = fns.drift(x.at(k));
      const double ap = fns.drift.deriv(x.at(k));
      v += -ap * (x.at(k + 1) - x.at(k)) + a + a * ap * delta;
    }
    g[static_cast<std::size_t>(k - 1)] = v;
  }
  for (int i = 0; i < t.obs().count(); ++i) {
    const int j = t.obs().indices[static_cast<std::size_t>(i)];
    const double xj = x.at(j);
    const double r = t.obs().values[static_cast<std::size_t>(i)] - fns.obs_map.value(xj);
    g[static_cast<std::size_t>(j - 1)] -= r * fns.obs_map.deriv(xj) / t.obs().sigma2;
  }
  return g;
}

SymTridiag metric_tensor(const DiffusionTarget& t, const Path& x) {
  if (!(x.grid == t.grid())) {
    throw DimensionMismatch("path grid does not match target grid");
  }
  SymTridiag g = t.prior_precision();
  const auto& fns = t.fns();
  for (int i = 0; i < t.obs().count(); ++i) {
    const int j = t.obs().indices[static_cast<std::size_t>(i)];
    const double fp = fns.obs_map.deriv(x.at(j));
    g.diag[static_cast<std::size_t>(j - 1)] += fp * fp / t.obs().sigma2;
  }
  return g;
}

std::vector<double> s_vector(const DiffusionTarget& t, const Path& x, const SymTridiag& g,
                             const CholBidiag& gf) {
  return s_vector_with_grad(t, x, grad_phi(t, x), g, gf);
}

std::vector<double> s_vector_with_grad(const DiffusionTarget& t, const Path& x,
                                       std::span<const double> grad, const SymTridiag& g,
                                       const CholBidiag& gf) {
  const auto n = static_cast<std::size_t>(t.grid().N);
  if (grad.size() != n || g.diag.size() != n || gf.d.size() != n) {
    throw DimensionMismatch("gradient/metric size does not match target grid");
  }
  const auto& prior = t.prior_precision();
  const auto lmu = t.prior_precision_mean();
  std::vector<double> r(n);
  // D = G - L is diagonal, so (G - L) x costs one pass.
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = grad[i] - (g.diag[i] - prior.diag[i]) * x.values[i] - lmu[i];
  }
  std::vector<double> s = solve(gf, r);
  for (double& v : s) v = -v;
  return s;
}

Path simulate_path_from_noise(const GridSpec& grid, const DriftFn& drift,
                              std::span<const double> xi) {
  validate_grid(grid);
  if (static_cast<int>(xi.size()) != grid.N) {
    throw DimensionMismatch("noise vector has " + std::to_string(xi.size()) +
                            " values for grid size " + std::to_string(grid.N));
  }
  const double sd = std::sqrt(grid.delta);
  std::vector<double> values(static_cast<std::size_t>(grid.N));
  double prev = grid.x_star;
  for (std::size_t j = 0; j < values.size(); ++j) {
    prev += drift(prev) * grid.delta + sd * xi[j];
    values[j] = prev;
  }
  return Path(grid, std::move(values));
}

Path simulate_path(const GridSpec& grid, const DriftFn& drift, Rng& rng) {
  validate_grid(grid);
  std::vector<double> xi(static_cast<std::size_t>(grid.N));
  rng.fill_normal(xi);
  return simulate_path_from_noise(grid, drift, xi);
}

ObservationSet simulate_observations_from_noise(const Path& x, std::vector<int> indices,
                                                const ObsMap& f, double sigma2,
                                                std::span<const double> zeta) {
  validate_indices(x.grid, indices, "observation");
  if (zeta.size() != indices.size()) {
    throw DimensionMismatch("noise vector has " + std::to_string(zeta.size()) + " values for " +
                            std::to_string(indices.size()) + " observations");
  }
  require_finite(sigma2, "observation variance sigma2");
  if (!(sigma2 > 0.0)) {
    throw Error("observation variance sigma2 must be > 0, got " + describe(sigma2));
  }
  const double sd = std::sqrt(sigma2);
  ObservationSet obs;
  obs.sigma2 = sigma2;
  obs.values.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    obs.values[i] = f.value(x.at(indices[i])) + sd * zeta[i];
  }
  obs.indices = std::move(indices);
  return obs;
}

ObservationSet simulate_observations(const Path& x, std::vector<int> indices, const ObsMap& f,
                                     double sigma2, Rng& rng) {
  std::vector<double> zeta(indices.size());
  rng.fill_normal(zeta);
  return simulate_observations_from_noise(x, std::move(indices), f, sigma2, zeta);
}

Path brownian_bridge_fill_from_noise(const GridSpec& grid, std::span<const int> pin_indices,
                                     std::span<const double> pin_values,
                                     std::span<const double> xi) {
  validate_grid(grid);
  if (pin_indices.size() != pin_values.size()) {
    throw InvalidPins("got " + std::to_string(pin_indices.size()) + " pin indices but " +
                      std::to_string(pin_values.size()) + " pin values");
  }
  validate_indices(grid, pin_indices, "pin");
  for (double v : pin_values) require_finite(v, "pin value");
  const std::size_t free_count = static_cast<std::size_t>(grid.N) - pin_indices.size();
  if (xi.size() != free_count) {
    throw DimensionMismatch("noise vector has " + std::to_string(xi.size()) + " values for " +
                            std::to_string(free_count) + " unpinned indices");
  }

  std::vector<double> values(static_cast<std::size_t>(grid.N));
  std::size_t pin = 0;   // next pin not yet passed
  std::size_t next = 0;  // next unused noise value
  double prev = grid.x_star;
  for (int k = 1; k <= grid.N; ++k) {
    double v;
    if (pin < pin_indices.size() && pin_indices[pin] == k) {
      v = pin_values[pin];
      ++pin;
    } else if (pin < pin_indices.size()) {
      // Bridge toward the next pin: m grid steps remain to reach it.
      const int m = pin_indices[pin] - k + 1;
      const double mean = prev + (pin_values[pin] - prev) / m;
      const double var = grid.delta * (m - 1) / m;
      v = mean + std::sqrt(var) * xi[next++];
    } else {
      v = prev + std::sqrt(grid.delta) * xi[next++];
    }
    values[static_cast<std::size_t>(k - 1)] = v;
    prev = v;
  }
  return Path(grid, std::move(values));
}

Path brownian_bridge_fill(const GridSpec& grid, std::span<const int> pin_indices,
                          std::span<const double> pin_values, Rng& rng) {
  validate_grid(grid);
  if (pin_indices.size() > static_cast<std::size_t>(grid.N)) {
    throw InvalidPins("more pins than grid points");
  }
  std::vector<double> xi(static_cast<std::size_t>(grid.N) - pin_indices.size());
  rng.fill_normal(xi);
  return brownian_bridge_fill_from_noise(grid, pin_indices, pin_values, xi);
}

}  // namespace infmmala
