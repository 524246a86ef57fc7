#ifndef MDSPLIT_DATASET_HPP_
#define MDSPLIT_DATASET_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdsplit {

// Immutable (feature, response) table. Group labels, when present, are the
// true subpopulation ids and are used for evaluation only.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd features, Eigen::VectorXd responses,
          std::optional<std::vector<int>> group_labels = std::nullopt);

  int n() const { return static_cast<int>(features_.rows()); }
  int dim() const { return static_cast<int>(features_.cols()); }
  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXd& responses() const { return responses_; }
  Eigen::VectorXd feature_row(int i) const { return features_.row(i); }
  double response(int i) const { return responses_(i); }
  bool has_group_labels() const { return group_labels_.has_value(); }
  const std::vector<int>& group_labels() const;
  int group_count() const;

  // Row subset, preserving the given index order.
  Dataset subset(const std::vector<int>& indices) const;

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd responses_;
  std::optional<std::vector<int>> group_labels_;
};

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> diagnostic;
  std::vector<int> calibration;
};

struct SplitFractions {
  double train = 0.0;
  double validation = 0.0;
  double diagnostic = 0.0;
  double calibration = 0.0;
};

// Disjoint index sets of sizes floor(fraction * n) drawn from a seeded
// uniform permutation; the remainder stays unassigned.
SplitIndices split(const Dataset& dataset, const SplitFractions& fractions,
                   std::uint64_t seed);

// Delimited text with mandatory header "x1,...,xd,y[,group]".
Dataset read_dataset(const std::string& path);
void write_dataset(const Dataset& dataset, const std::string& path);

}  // namespace mdsplit

#endif  // MDSPLIT_DATASET_HPP_
