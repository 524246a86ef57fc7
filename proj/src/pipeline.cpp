#include "mdsplit/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "mdsplit/errors.hpp"
#include "mdsplit/hpd.hpp"
#include "mdsplit/rng.hpp"
#include "mdsplit/serialize.hpp"

namespace mdsplit {

namespace {

template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (const CalibrationError& e) {
    throw CalibrationError(std::string(name) + ": " + e.what());
  } catch (const FitError& e) {
    throw FitError(std::string(name) + ": " + e.what());
  } catch (const IntegrationError& e) {
    throw IntegrationError(std::string(name) + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(std::string(name) + ": " + e.what());
  } catch (const UsageError& e) {
    throw UsageError(std::string(name) + ": " + e.what());
  }
}

Eigen::MatrixXd rows_of(const Dataset& data, const std::vector<int>& indices) {
  Eigen::MatrixXd out(indices.size(), data.dim());
  for (std::size_t i = 0; i < indices.size(); ++i)
    out.row(i) = data.features().row(indices[i]);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

}  // namespace

std::shared_ptr<const Dataset> make_data(const ExperimentConfig& config) {
  return stage("data", [&] {
    if (config.source == "file")
      return std::make_shared<const Dataset>(read_dataset(config.data_path));
    GeneratorConfig g = config.generator;
    g.seed = derive_seed(config.seed, "data");
    return std::make_shared<const Dataset>(generate(g));
  });
}

std::shared_ptr<const Dataset> make_test_data(const ExperimentConfig& config) {
  return stage("test-data", [&] {
    if (config.source == "file")
      return std::make_shared<const Dataset>(read_dataset(config.test_path));
    GeneratorConfig g = config.generator;
    g.sample_count = config.test_n;
    g.seed = derive_seed(config.seed, "test");
    return std::make_shared<const Dataset>(generate(g));
  });
}

PipelineResult run_pipeline(const ExperimentConfig& config,
                            std::shared_ptr<const Dataset> data,
                            std::shared_ptr<const Dataset> test) {
  config.validate();
  PipelineResult result;
  result.data = std::move(data);
  result.test = std::move(test);

  const SplitFractions fractions = config.effective_fractions();
  result.splits = stage("split", [&] {
    SplitIndices s = split(*result.data, fractions, derive_seed(config.seed, "split"));
    if (s.train.empty()) throw ConfigError("training set is empty");
    if (s.validation.empty()) throw ConfigError("validation set is empty");
    if (s.calibration.empty()) throw ConfigError("calibration set is empty");
    if (config.method == PartitionMethod::md && s.diagnostic.empty())
      throw ConfigError("md method needs a nonempty diagnostic set");
    return s;
  });

  result.cde = stage("fit-cde", [&] {
    const Dataset train = result.data->subset(result.splits.train);
    const Dataset validation = result.data->subset(result.splits.validation);
    const CdeFitOptions options{config.grid_points, config.grid_pad_sds};
    if (config.cde_variant == "gaussian_linear")
      return std::make_shared<const CdeModel>(
          fit_gaussian_linear(train, validation, config.bandwidth_grid, options));
    return std::make_shared<const CdeModel>(fit_knn_mixture(
        train, validation, config.k_grid, config.mixture_components, options));
  });

  std::shared_ptr<const Embedding> embedding;
  if (config.method == PartitionMethod::md) {
    result.coverage = stage("fit-coverage-estimator", [&] {
      const HpdEvaluator evaluator(result.cde, HpdEvaluator::Method::grid);
      CoverageDiagnosticSet diagnostic{
          rows_of(*result.data, result.splits.diagnostic),
          evaluator.hpd_batch(*result.data, result.splits.diagnostic)};
      CoverageDiagnosticSet validation{
          rows_of(*result.data, result.splits.validation),
          evaluator.hpd_batch(*result.data, result.splits.validation)};
      return std::make_shared<const CoverageEstimator>(fit_coverage_estimator(
          diagnostic, validation, config.coverage_bandwidth_grid,
          AlphaGrid(config.alpha_step)));
    });
    embedding = std::make_shared<MdEmbedding>(result.coverage);
  } else if (config.method == PartitionMethod::cd) {
    embedding = std::make_shared<CdEmbedding>(result.cde);
  } else if (config.method == PartitionMethod::euclidean) {
    embedding = std::make_shared<EuclideanEmbedding>(
        Standardizer::fit(rows_of(*result.data, result.splits.train)));
  }

  result.partition = stage("partition", [&] {
    if (config.method == PartitionMethod::global)
      return std::make_shared<const PartitionModel>(PartitionMethod::global);
    return std::make_shared<const PartitionModel>(fit_partition(
        config.method, embedding, rows_of(*result.data, result.splits.calibration),
        config.cluster_count, derive_seed(config.seed, "partition"),
        config.kmeans_restarts));
  });

  result.predictor = stage("calibrate", [&] {
    return std::make_shared<const LocalConformalPredictor>(
        calibrate(result.partition, ScoreFunction(config.effective_score(), result.cde),
                  *result.data, result.splits.calibration, config.epsilon_min));
  });

  return result;
}

PipelineResult run_pipeline(const ExperimentConfig& config) {
  config.validate();
  return run_pipeline(config, make_data(config), make_test_data(config));
}

void write_run_outputs(const ExperimentConfig& config, const PipelineResult& result,
                       const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::string artifacts = out_dir + "/artifacts";
  ensure_dir(artifacts);

  write_text(out_dir + "/config.txt", config.canonical_text());
  write_dataset(*result.data, artifacts + "/dataset.csv");
  write_dataset(*result.test, artifacts + "/test.csv");
  save_cde(*result.cde, artifacts + "/cde_model.txt");
  if (result.coverage)
    save_coverage_estimator(*result.coverage, artifacts + "/coverage_estimator.txt");
  save_partition(*result.partition, artifacts + "/partition.txt");
  save_predictor(*result.predictor, artifacts + "/predictor.txt");

  const CoverageFlags flags =
      evaluate_coverage(*result.predictor, *result.test, config.levels);
  render_report(coverage_marginal(flags), out_dir + "/coverage_marginal");
  if (result.test->dim() == 1)
    render_report(coverage_by_bins(flags, *result.test, config.bin_count),
                  out_dir + "/coverage_by_bins");
  if (result.test->has_group_labels())
    render_report(coverage_by_groups(flags, *result.test),
                  out_dir + "/coverage_by_groups");
  render_report(coverage_by_clusters(flags, result.partition->group_count()),
                out_dir + "/coverage_by_clusters");
}

void run_simulate(const ExperimentConfig& config, const std::string& out_dir) {
  if (config.source != "generate")
    throw ConfigError("simulate requires data.source = generate");
  ensure_dir(out_dir);
  const auto data = make_data(config);
  write_dataset(*data, out_dir + "/dataset.csv");
  write_text(out_dir + "/dataset.provenance.txt", config.canonical_text());
}

void run_compare(const std::vector<ExperimentConfig>& configs,
                 std::uint64_t test_seed, const std::string& out_dir) {
  if (configs.empty()) throw ConfigError("compare: no configs given");
  for (const ExperimentConfig& cfg : configs) {
    if (cfg.source != configs.front().source ||
        to_string(cfg.generator.id) != to_string(configs.front().generator.id) ||
        cfg.test_n != configs.front().test_n ||
        cfg.levels != configs.front().levels)
      throw ConfigError(
          "compare: configs must share the generator, test size and levels");
  }
  ensure_dir(out_dir);

  ExperimentConfig test_config = configs.front();
  test_config.seed = test_seed;
  const auto test = stage("test-data", [&] {
    if (test_config.source == "file")
      return std::make_shared<const Dataset>(read_dataset(test_config.test_path));
    GeneratorConfig g = test_config.generator;
    g.sample_count = test_config.test_n;
    g.seed = derive_seed(test_seed, "test");
    return std::make_shared<const Dataset>(generate(g));
  });

  // method names label the outputs; duplicates get an index suffix
  std::vector<std::string> names;
  for (const ExperimentConfig& cfg : configs) {
    std::string name = to_string(cfg.method);
    int copy = 1;
    while (std::find(names.begin(), names.end(), name) != names.end())
      name = to_string(cfg.method) + "_" + std::to_string(++copy);
    names.push_back(name);
  }

  std::vector<PipelineResult> results;
  std::vector<std::pair<std::string, const LocalConformalPredictor*>> predictors;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    PipelineResult r = run_pipeline(configs[i], make_data(configs[i]), test);
    write_run_outputs(configs[i], r, out_dir + "/" + names[i]);
    results.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < configs.size(); ++i)
    predictors.emplace_back(names[i], results[i].predictor.get());

  const ExperimentConfig& base = configs.front();
  if (test->dim() == 1)
    write_comparison(compare(predictors, *test, "x-bin", base.bin_count, base.levels),
                     out_dir + "/comparison_by_bins.csv");
  if (test->has_group_labels())
    write_comparison(compare(predictors, *test, "true-group", base.bin_count,
                             base.levels),
                     out_dir + "/comparison_by_groups.csv");
  write_comparison(compare(predictors, *test, "marginal", base.bin_count, base.levels),
                   out_dir + "/comparison_marginal.csv");
}

}  // namespace mdsplit
