#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "infmmala/config.hpp"

namespace infmmala {

// Reads a data CSV (columns t,y), mapping times onto the grid. Content
// problems (missing columns, off-grid or non-increasing times) are reported
// as IoError naming the file.
ObservationSet load_observations_csv(const std::filesystem::path& file, const GridSpec& grid,
                                     double sigma2);

// Draws a latent path and observations; writes data.csv (t,y) and truth.csv
// (t,x including the origin row).
void cmd_simulate(const ExperimentConfig& cfg);

// Runs `chains` independent chains of the configured sampler; per chain
// writes steps.csv, trace.csv and summary.csv (suffixed _chain<k> when
// chains > 1). `data_file` overrides the config's data source.
void cmd_sample(const ExperimentConfig& cfg, const std::optional<std::string>& data_file,
                int chains);

// Runs each requested algorithm on identical data and seed, recording the
// quadratic variation of every proposal to qv_<algo>.csv.
void cmd_qvstudy(const ExperimentConfig& cfg, const std::vector<std::string>& algos);

// Runs the configured sampler at delta, delta/2, ..., delta/2^(levels-1)
// with the observation data held fixed, appending one row per level to
// mesh.csv.
void cmd_meshstudy(const ExperimentConfig& cfg, int levels);

}  // namespace infmmala
