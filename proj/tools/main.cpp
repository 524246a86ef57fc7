#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "mdsplit/config.hpp"
#include "mdsplit/errors.hpp"
#include "mdsplit/pipeline.hpp"
#include "mdsplit/rng.hpp"

namespace {

mdsplit::ExperimentConfig load_config(const std::string& path,
                                      const std::optional<std::uint64_t>& seed) {
  mdsplit::ExperimentConfig cfg = mdsplit::ExperimentConfig::from_file(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local conformal inference with model-diagnostic partitions"};
  app.require_subcommand(1);

  std::vector<std::string> config_paths;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<std::uint64_t> test_seed;

  auto add_common = [&](CLI::App* cmd, bool multi_config) {
    auto* opt = cmd->add_option("--config", config_paths, "config file path");
    opt->required();
    if (!multi_config) opt->expected(1);
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_override, "master seed override");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "write a synthetic dataset");
  add_common(simulate, false);

  CLI::App* run = app.add_subcommand("run", "run one pipeline and write reports");
  add_common(run, false);

  CLI::App* cmp = app.add_subcommand(
      "compare", "run several pipelines against one shared test set");
  add_common(cmp, true);
  cmp->add_option("--test-seed", test_seed,
                  "seed for the shared test set (default: derived from the "
                  "first config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      mdsplit::run_simulate(load_config(config_paths.front(), seed_override),
                            out_dir);
    } else if (run->parsed()) {
      const mdsplit::ExperimentConfig cfg =
          load_config(config_paths.front(), seed_override);
      const mdsplit::PipelineResult result = mdsplit::run_pipeline(cfg);
      mdsplit::write_run_outputs(cfg, result, out_dir);
    } else if (cmp->parsed()) {
      std::vector<mdsplit::ExperimentConfig> configs;
      for (const std::string& path : config_paths)
        configs.push_back(load_config(path, seed_override));
      const std::uint64_t ts =
          test_seed ? *test_seed
                    : mdsplit::derive_seed(configs.front().seed, "compare-test");
      mdsplit::run_compare(configs, ts, out_dir);
    }
  } catch (const mdsplit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const mdsplit::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
