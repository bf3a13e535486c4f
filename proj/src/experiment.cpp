#include "infmmala/experiment.hpp"

#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <thread>
#include <utility>

#include "infmmala/csv.hpp"
#include "infmmala/errors.hpp"
#include "infmmala/rng.hpp"

namespace infmmala {

namespace {

namespace fs = std::filesystem;

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create output directory: " + ec.message());
  return dir;
}

std::vector<int> obs_indices(const ExperimentConfig& cfg) {
  return trace_indices(cfg.grid, cfg.obs_times);
}

struct SimulatedData {
  Path truth;
  ObservationSet obs;
};

SimulatedData simulate_data(const ExperimentConfig& cfg) {
  if (cfg.data_mode != ExperimentConfig::DataMode::Simulate) {
    throw ValidationError("data.mode", "this run needs data.mode=simulate");
  }
  Rng rng(derive_seed(cfg.seed, 0));
  SimulatedData d;
  d.truth = simulate_path(cfg.grid, cfg.fns.drift, rng);
  d.obs = simulate_observations(d.truth, obs_indices(cfg), cfg.fns.obs_map, cfg.sigma2, rng);
  return d;
}

// Observations for a sampling run: an explicit --data file wins, then the
// config's file, then simulation from the config's data seed (which matches
// what cmd_simulate would have written).
ObservationSet resolve_observations(const ExperimentConfig& cfg,
                                    const std::optional<std::string>& data_file) {
  if (data_file) return load_observations_csv(*data_file, cfg.grid, cfg.sigma2);
  if (cfg.data_mode == ExperimentConfig::DataMode::File) {
    return load_observations_csv(cfg.data_path, cfg.grid, cfg.sigma2);
  }
  return simulate_data(cfg).obs;
}

std::string time_column(const GridSpec& grid, int index) {
  return "t_" + csv::format(index * grid.delta);
}

std::uint64_t chain_seed(const ExperimentConfig& cfg, int chain) {
  return derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(chain));
}

void run_one_sampling_chain(const ExperimentConfig& cfg, const DiffusionTarget& target,
                            const std::vector<int>& trace_idx, const fs::path& dir,
                            const std::string& suffix, int chain) {
  csv::Writer steps(dir / ("steps" + suffix + ".csv"),
                    {"iteration", "accepted", "log_ratio", "acc_prob", "qve_proposed"});
  std::vector<std::string> trace_header{"iteration"};
  for (int j : trace_idx) trace_header.push_back(time_column(target.grid(), j));
  csv::Writer trace(dir / ("trace" + suffix + ".csv"), trace_header);

  RunHooks hooks;
  hooks.trace_idx = trace_idx;
  hooks.on_step = [&](long long i, const StepRecord& rec, const Path& current) {
    steps.cell(i).cell(rec.accepted).cell(rec.log_ratio).cell(rec.acc_prob).cell(
        rec.qve_proposed);
    steps.end_row();
    trace.cell(i);
    for (int j : trace_idx) trace.cell(current.at(j));
    trace.end_row();
  };
  const ChainSummary summary =
      run_chain(target, cfg.algo, cfg.h, cfg.iters, cfg.init, chain_seed(cfg, chain), hooks);
  steps.close();
  trace.close();

  std::vector<std::string> header{"acceptance_rate", "n_steps", "metric_failures"};
  for (int j : trace_idx) {
    header.push_back("mean_" + time_column(target.grid(), j));
    header.push_back("var_" + time_column(target.grid(), j));
  }
  csv::Writer out(dir / ("summary" + suffix + ".csv"), header);
  out.cell(summary.acceptance_rate).cell(summary.n_steps).cell(summary.metric_failures);
  for (int j : trace_idx) {
    out.cell(summary.coord_mean[static_cast<std::size_t>(j - 1)]);
    out.cell(summary.coord_var[static_cast<std::size_t>(j - 1)]);
  }
  out.end_row();
  out.close();

  // One preassembled write so concurrent chains cannot interleave mid-line.
  const std::string line = "chain " + std::to_string(chain) +
                           ": acceptance_rate=" + csv::format(summary.acceptance_rate) +
                           " over " + std::to_string(summary.n_steps) + " steps\n";
  std::cout << line;
}

}  // namespace

ObservationSet load_observations_csv(const fs::path& file, const GridSpec& grid, double sigma2) {
  const csv::Table table = csv::read_table(file);
  const std::size_t tc = table.col("t");
  const std::size_t yc = table.col("y");
  if (table.rows() == 0) throw IoError(file.string() + ": no observation rows");
  ObservationSet obs;
  obs.sigma2 = sigma2;
  int prev = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double t = table.num(r, tc);
    int j = 0;
    try {
      j = grid_index_of_time(grid, t);
    } catch (const OffGridTime& e) {
      throw IoError(file.string() + ": row " + std::to_string(r + 1) + ": " + e.what());
    }
    if (j <= prev) {
      throw IoError(file.string() + ": row " + std::to_string(r + 1) +
                    ": observation times must be strictly increasing");
    }
    prev = j;
    obs.indices.push_back(j);
    obs.values.push_back(table.num(r, yc));
  }
  return obs;
}

void cmd_simulate(const ExperimentConfig& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const SimulatedData d = simulate_data(cfg);

  csv::Writer data(dir / "data.csv", {"t", "y"});
  for (int i = 0; i < d.obs.count(); ++i) {
    data.cell(d.obs.indices[static_cast<std::size_t>(i)] * cfg.grid.delta);
    data.cell(d.obs.values[static_cast<std::size_t>(i)]);
    data.end_row();
  }
  data.close();

  csv::Writer truth(dir / "truth.csv", {"t", "x"});
  for (int j = 0; j <= cfg.grid.N; ++j) {
    truth.cell(j * cfg.grid.delta).cell(d.truth.at(j));
    truth.end_row();
  }
  truth.close();

  std::cout << "wrote " << (dir / "data.csv").string() << " (" << d.obs.count()
            << " observations) and " << (dir / "truth.csv").string() << " (" << cfg.grid.N + 1
            << " rows)\n";
}

void cmd_sample(const ExperimentConfig& cfg, const std::optional<std::string>& data_file,
                int chains) {
  if (chains < 1) throw ValidationError("chains", "must be >= 1");
  const fs::path dir = ensure_out_dir(cfg);
  const ObservationSet obs = resolve_observations(cfg, data_file);
  const DiffusionTarget target(cfg.grid, obs, cfg.fns);
  const std::vector<int> trace_idx = trace_indices(cfg.grid, cfg.trace_times);

  if (chains == 1) {
    run_one_sampling_chain(cfg, target, trace_idx, dir, "", 0);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(chains));
  for (int c = 0; c < chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        run_one_sampling_chain(cfg, target, trace_idx, dir, "_chain" + std::to_string(c), c);
      } catch (...) {
        failures[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

void cmd_qvstudy(const ExperimentConfig& cfg, const std::vector<std::string>& algos) {
  if (algos.empty()) throw ValidationError("algos", "must name at least one algorithm");
  std::vector<Algo> parsed;
  for (const auto& name : algos) parsed.push_back(algo_from_name(name));

  const fs::path dir = ensure_out_dir(cfg);
  const ObservationSet obs = resolve_observations(cfg, std::nullopt);
  const DiffusionTarget target(cfg.grid, obs, cfg.fns);

  for (const Algo algo : parsed) {
    const std::string name = algo_name(algo);
    csv::Writer qv(dir / ("qv_" + name + ".csv"), {"iteration", "qve_proposed", "accepted"});
    double qve_sum = 0.0;
    RunHooks hooks;
    hooks.on_step = [&](long long i, const StepRecord& rec, const Path&) {
      qv.cell(i).cell(rec.qve_proposed).cell(rec.accepted);
      qv.end_row();
      qve_sum += rec.qve_proposed;
    };
    const ChainSummary summary =
        run_chain(target, algo, cfg.h, cfg.iters, cfg.init, chain_seed(cfg, 0), hooks);
    qv.close();
    std::cout << name << ": acceptance_rate=" << csv::format(summary.acceptance_rate)
              << " mean_qve_proposed="
              << csv::format(qve_sum / static_cast<double>(summary.n_steps)) << "\n";
  }
}

void cmd_meshstudy(const ExperimentConfig& cfg, int levels) {
  if (levels < 1) throw ValidationError("levels", "must be >= 1");
  if (levels > 16) throw ValidationError("levels", "must be <= 16");
  const fs::path dir = ensure_out_dir(cfg);
  const ObservationSet obs = resolve_observations(cfg, std::nullopt);

  csv::Writer mesh(dir / "mesh.csv", {"delta", "algo", "h", "acceptance_rate"});
  for (int level = 0; level < levels; ++level) {
    const int factor = 1 << level;
    if (cfg.grid.N > (std::numeric_limits<int>::max() >> level)) {
      throw ValidationError("levels", "refined grid size overflows at level " +
                                          std::to_string(level));
    }
    GridSpec fine{cfg.grid.N * factor, cfg.grid.delta / factor, cfg.grid.x_star};
    ObservationSet fine_obs = obs;
    for (int& j : fine_obs.indices) j *= factor;
    const DiffusionTarget target(fine, fine_obs, cfg.fns);
    const ChainSummary summary =
        run_chain(target, cfg.algo, cfg.h, cfg.iters, cfg.init, chain_seed(cfg, 0));
    mesh.cell(fine.delta).cell(algo_name(cfg.algo)).cell(cfg.h).cell(summary.acceptance_rate);
    mesh.end_row();
    std::cout << "delta=" << csv::format(fine.delta)
              << ": acceptance_rate=" << csv::format(summary.acceptance_rate) << "\n";
  }
  mesh.close();
}

}  // namespace infmmala
