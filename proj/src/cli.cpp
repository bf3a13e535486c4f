#include "infmmala/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infmmala/errors.hpp"
#include "infmmala/experiment.hpp"

namespace infmmala {

namespace {

struct CliArgs {
  std::string config_path;
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  std::string data_file;
  std::vector<std::string> algos{"inf-mmala", "mmala"};
  int chains = 1;
  int levels = 2;
};

// Precedence for the output directory: --out, then OUT_DIR, then the config.
ExperimentConfig resolve_config(const CliArgs& args) {
  if (args.config_path.empty() == args.preset.empty()) {
    throw ValidationError("config", "give exactly one of --config and --preset");
  }
  ExperimentConfig cfg = args.preset.empty() ? load_config_file(args.config_path)
                                             : preset_config(args.preset);
  if (args.seed_given) cfg.seed = args.seed;
  if (!args.out_dir.empty()) {
    cfg.out_dir = args.out_dir;
  } else if (const char* env = std::getenv("OUT_DIR"); env != nullptr && *env != '\0') {
    cfg.out_dir = env;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "Path to a JSON experiment config");
  cmd->add_option("--out", args.out_dir, "Output directory (overrides config and OUT_DIR)");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CliArgs args;
  CLI::App app{"Semi-implicit manifold MCMC for diffusion paths observed with error"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", args.seed, "Override the config seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
  app.add_option("--preset", args.preset, "Built-in scenario: fig1, fig2 or mesh");

  CLI::App* simulate = app.add_subcommand("simulate", "Draw a latent path and observations");
  add_common(simulate, args);

  CLI::App* sample = app.add_subcommand("sample", "Run the configured sampler");
  add_common(sample, args);
  sample->add_option("--data", args.data_file, "Observation CSV (columns t,y)");
  sample->add_option("--chains", args.chains, "Number of independent chains")
      ->check(CLI::PositiveNumber);

  CLI::App* qvstudy =
      app.add_subcommand("qvstudy", "Record proposal quadratic variation per algorithm");
  add_common(qvstudy, args);
  qvstudy->add_option("--algos", args.algos, "Comma-separated algorithms")->delimiter(',');

  CLI::App* meshstudy =
      app.add_subcommand("meshstudy", "Acceptance rate under grid refinement");
  add_common(meshstudy, args);
  meshstudy->add_option("--levels", args.levels, "Number of refinement levels (delta halves each)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    const ExperimentConfig cfg = resolve_config(args);
    if (simulate->parsed()) {
      cmd_simulate(cfg);
    } else if (sample->parsed()) {
      std::optional<std::string> data;
      if (!args.data_file.empty()) data = args.data_file;
      cmd_sample(cfg, data, args.chains);
    } else if (qvstudy->parsed()) {
      cmd_qvstudy(cfg, args.algos);
    } else {
      cmd_meshstudy(cfg, args.levels);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace infmmala
