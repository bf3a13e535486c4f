#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infmmala/model.hpp"
#include "infmmala/sampler.hpp"

namespace infmmala {

// One experiment, fully resolved and validated. See README for the JSON
// schema this is parsed from.
struct ExperimentConfig {
  GridSpec grid;
  ModelFunctions fns;
  double sigma2 = 0.0;

  enum class DataMode { Simulate, File };
  DataMode data_mode = DataMode::Simulate;
  std::vector<double> obs_times;  // Simulate mode: where observations land
  std::string data_path;          // File mode: CSV with columns t,y

  Algo algo = Algo::InfMmala;
  double h = 0.0;
  long long iters = 0;
  InitStrategy init = InitStrategy::prior();
  std::uint64_t seed = 0;

  std::string out_dir = "out";
  std::vector<double> trace_times;
};

// Parses and validates a JSON config document. Malformed JSON raises
// ParseError with the position; a well-formed document with a bad value
// raises ValidationError naming the field. Defaults: sampler.seed 0,
// output.dir "out", output.trace_times [].
ExperimentConfig parse_config(const std::string& text);

// parse_config over the contents of a file; unreadable file raises IoError.
ExperimentConfig load_config_file(const std::string& path);

// Built-in scenario configs: the common setup is drift 4 - x, origin 2,
// unit-spaced observations over [1, 100] through the power32 map with noise
// variance 0.1, grid delta 0.01 (N = 10^4).
//   fig1: inf-mmala, h=1, 2000 iterations, flat_bridge(2) init,
//         traces at t=37 and t=36.5.
//   fig2: data_pinned init, h=1, 1000 iterations (for the QV study).
//   mesh: as fig1 without traces (for the mesh-refinement study).
ExperimentConfig preset_config(const std::string& name);

}  // namespace infmmala
