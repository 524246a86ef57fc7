#ifndef MDSPLIT_CONFORMAL_HPP_
#define MDSPLIT_CONFORMAL_HPP_

#include <memory>
#include <string>
#include <vector>

#include "mdsplit/cde.hpp"
#include "mdsplit/dataset.hpp"
#include "mdsplit/hpd.hpp"
#include "mdsplit/partition.hpp"

namespace mdsplit {

enum class ScoreKind { hpd, cde_value, abs_residual };
enum class ScoreOrientation { larger_more_extreme, smaller_more_extreme };

ScoreKind score_kind_from_string(const std::string& name);
std::string to_string(ScoreKind kind);

// Conformity score with a fixed extremeness orientation per kind:
// hpd and abs_residual are more extreme when larger, cde_value when
// smaller.
class ScoreFunction {
 public:
  ScoreFunction(ScoreKind kind, std::shared_ptr<const CdeModel> model);

  ScoreKind kind() const { return kind_; }
  ScoreOrientation orientation() const;
  const CdeModel& model() const { return *model_; }
  const GridSpec& grid() const { return model_->grid(); }

  double score(const Eigen::VectorXd& x, double y) const;
  // scores of every response-grid node (single conditional evaluation)
  std::vector<double> score_curve(const Eigen::VectorXd& x) const;

 private:
  ScoreKind kind_;
  std::shared_ptr<const CdeModel> model_;
  std::shared_ptr<const HpdEvaluator> hpd_;
};

// Closed response interval [lo, hi].
struct Interval {
  double lo;
  double hi;
};

struct PredictionRegion {
  std::vector<Interval> intervals;  // disjoint, sorted
  double nominal_level = 0.0;       // 1 - epsilon
  int group = 0;
  bool touches_grid_boundary = false;

  double total_length() const;
};

bool contains(const PredictionRegion& region, double y);

// Per-x score context so that sweeping epsilon or scanning the grid does
// not refit the conditional.
struct ScoredQuery {
  int group = 0;
  double score_at_y = 0.0;  // only set by score_query(x, y)
  std::vector<double> curve;
};

// Split-conformal predictor over a feature-space partition: one sorted
// calibration score vector per group.
class LocalConformalPredictor {
 public:
  LocalConformalPredictor(std::shared_ptr<const PartitionModel> partition,
                          ScoreFunction score,
                          std::vector<std::vector<double>> group_scores);

  const PartitionModel& partition() const { return *partition_; }
  const ScoreFunction& score_function() const { return score_; }
  const std::vector<std::vector<double>>& group_scores() const {
    return group_scores_;
  }
  const GridSpec& grid() const { return score_.grid(); }

  double p_value(const Eigen::VectorXd& x, double y) const;
  PredictionRegion region(const Eigen::VectorXd& x, double epsilon) const;

  ScoredQuery prepare(const Eigen::VectorXd& x) const;
  PredictionRegion region_from(const ScoredQuery& q, double epsilon) const;
  double p_value_of_score(int group, double s) const;

 private:
  std::shared_ptr<const PartitionModel> partition_;
  ScoreFunction score_;
  std::vector<std::vector<double>> group_scores_;
};

// Score every calibration point, route it to its assigned group, sort
// within group. Groups smaller than ceil(1/epsilon_min) - 1 are an error.
LocalConformalPredictor calibrate(std::shared_ptr<const PartitionModel> partition,
                                  ScoreFunction score, const Dataset& data,
                                  const std::vector<int>& calibration_indices,
                                  double epsilon_min = 0.05);

double p_value(const LocalConformalPredictor& predictor, const Eigen::VectorXd& x,
               double y);
PredictionRegion region(const LocalConformalPredictor& predictor,
                        const Eigen::VectorXd& x, double epsilon);

}  // namespace mdsplit

#endif  // MDSPLIT_CONFORMAL_HPP_
