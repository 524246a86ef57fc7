#ifndef MDSPLIT_SERIALIZE_HPP_
#define MDSPLIT_SERIALIZE_HPP_

#include <memory>
#include <string>

#include "mdsplit/cde.hpp"
#include "mdsplit/conformal.hpp"
#include "mdsplit/diagnostics.hpp"
#include "mdsplit/partition.hpp"

namespace mdsplit {

// Versioned, self-describing text formats. Doubles are printed with
// %.17g so every round trip is bit exact.

void save_cde(const CdeModel& model, const std::string& path);
CdeModel load_cde(const std::string& path);

void save_coverage_estimator(const CoverageEstimator& estimator,
                             const std::string& path);
CoverageEstimator load_coverage_estimator(const std::string& path);

// Partitions persist method, K, centroids and the embedding spec. The
// euclidean standardizer is stored inline; md/cd embeddings are rebound to
// their models at load time.
void save_partition(const PartitionModel& model, const std::string& path);
PartitionModel load_partition(
    const std::string& path,
    std::shared_ptr<const CoverageEstimator> md_estimator = nullptr,
    std::shared_ptr<const CdeModel> cd_model = nullptr);

void save_predictor(const LocalConformalPredictor& predictor,
                    const std::string& path);
LocalConformalPredictor load_predictor(
    const std::string& path, std::shared_ptr<const PartitionModel> partition,
    std::shared_ptr<const CdeModel> model);

}  // namespace mdsplit

#endif  // MDSPLIT_SERIALIZE_HPP_
