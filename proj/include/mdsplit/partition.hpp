#ifndef MDSPLIT_PARTITION_HPP_
#define MDSPLIT_PARTITION_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mdsplit/cde.hpp"
#include "mdsplit/diagnostics.hpp"
#include "mdsplit/hpd.hpp"

namespace mdsplit {

enum class PartitionMethod { md, cd, euclidean, global };

PartitionMethod partition_method_from_string(const std::string& name);
std::string to_string(PartitionMethod method);

// Maps a feature vector into the space whose squared Euclidean distance is
// the method's dissimilarity.
class Embedding {
 public:
  virtual ~Embedding() = default;
  virtual Eigen::VectorXd embed(const Eigen::VectorXd& x) const = 0;
  virtual int dim() const = 0;
};

// Coverage profile scaled by 1/sqrt(p): squared distances equal the mean
// squared profile difference across the alpha grid.
class MdEmbedding : public Embedding {
 public:
  explicit MdEmbedding(std::shared_ptr<const CoverageEstimator> estimator);
  Eigen::VectorXd embed(const Eigen::VectorXd& x) const override;
  int dim() const override;
  const CoverageEstimator& estimator() const { return *estimator_; }

 private:
  std::shared_ptr<const CoverageEstimator> estimator_;
};

// HPD curve over the response grid scaled by sqrt(grid step): squared
// distances approximate the integrated squared HPD-curve difference.
class CdEmbedding : public Embedding {
 public:
  explicit CdEmbedding(std::shared_ptr<const CdeModel> model);
  Eigen::VectorXd embed(const Eigen::VectorXd& x) const override;
  int dim() const override;

 private:
  HpdEvaluator evaluator_;
};

// Standardized raw features.
class EuclideanEmbedding : public Embedding {
 public:
  explicit EuclideanEmbedding(Standardizer standardizer);
  Eigen::VectorXd embed(const Eigen::VectorXd& x) const override;
  int dim() const override;
  const Standardizer& standardizer() const { return standardizer_; }

 private:
  Standardizer standardizer_;
};

struct KmeansResult {
  Eigen::MatrixXd centroids;  // K x p
  std::vector<int> assignments;
  double within_ss = 0.0;
};

// k-means++ seeding (D^2 sampling) plus Lloyd iterations; best of
// `restarts` seeded runs by within-cluster sum of squares. Requires at
// least K distinct points.
KmeansResult kmeanspp(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                      int restarts = 10);

class PartitionModel {
 public:
  // global partition (K = 1, no embedding)
  explicit PartitionModel(PartitionMethod method);
  PartitionModel(PartitionMethod method, Eigen::MatrixXd centroids,
                 std::shared_ptr<const Embedding> embedding);

  PartitionMethod method() const { return method_; }
  int group_count() const;
  const Eigen::MatrixXd& centroids() const { return centroids_; }
  const Embedding* embedding() const { return embedding_.get(); }

  int assign(const Eigen::VectorXd& x) const;
  int assign_embedded(const Eigen::VectorXd& point) const;

 private:
  PartitionMethod method_;
  Eigen::MatrixXd centroids_;
  std::shared_ptr<const Embedding> embedding_;
};

// Centroids from the calibration points' embeddings only.
PartitionModel fit_partition(PartitionMethod method,
                             std::shared_ptr<const Embedding> embedding,
                             const Eigen::MatrixXd& calibration_features,
                             int k, std::uint64_t seed, int restarts = 10);

int assign(const PartitionModel& model, const Eigen::VectorXd& x);

}  // namespace mdsplit

#endif  // MDSPLIT_PARTITION_HPP_
