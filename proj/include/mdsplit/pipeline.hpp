#ifndef MDSPLIT_PIPELINE_HPP_
#define MDSPLIT_PIPELINE_HPP_

#include <memory>
#include <string>

#include "mdsplit/config.hpp"
#include "mdsplit/eval.hpp"

namespace mdsplit {

struct PipelineResult {
  std::shared_ptr<const Dataset> data;
  std::shared_ptr<const Dataset> test;
  SplitIndices splits;
  std::shared_ptr<const CdeModel> cde;
  std::shared_ptr<const CoverageEstimator> coverage;  // md only
  std::shared_ptr<const PartitionModel> partition;
  std::shared_ptr<const LocalConformalPredictor> predictor;
};

// Dataset + test set from the config (generated with stage-derived seeds,
// or read from files).
std::shared_ptr<const Dataset> make_data(const ExperimentConfig& config);
std::shared_ptr<const Dataset> make_test_data(const ExperimentConfig& config);

// split -> fit CDE -> (md) coverage estimator -> partition -> calibrate.
// Every stage draws its randomness from a seed derived from config.seed
// and the stage name.
PipelineResult run_pipeline(const ExperimentConfig& config,
                            std::shared_ptr<const Dataset> data,
                            std::shared_ptr<const Dataset> test);
PipelineResult run_pipeline(const ExperimentConfig& config);

// cmd_run: pipeline + reports + serialized stage artifacts under out_dir.
void write_run_outputs(const ExperimentConfig& config, const PipelineResult& result,
                       const std::string& out_dir);

// cmd_simulate: dataset file + provenance sidecar.
void run_simulate(const ExperimentConfig& config, const std::string& out_dir);

// cmd_compare: each config's pipeline on one shared test set; emits
// per-method reports and the comparison tables.
void run_compare(const std::vector<ExperimentConfig>& configs,
                 std::uint64_t test_seed, const std::string& out_dir);

}  // namespace mdsplit

#endif  // MDSPLIT_PIPELINE_HPP_
