#include "mdsplit/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "mdsplit/errors.hpp"

namespace mdsplit {

ScoreKind score_kind_from_string(const std::string& name) {
  if (name == "hpd") return ScoreKind::hpd;
  if (name == "cde_value") return ScoreKind::cde_value;
  if (name == "abs_residual") return ScoreKind::abs_residual;
  throw ConfigError("unknown score '" + name +
                    "' (valid: hpd, cde_value, abs_residual)");
}

std::string to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::hpd: return "hpd";
    case ScoreKind::cde_value: return "cde_value";
    case ScoreKind::abs_residual: return "abs_residual";
  }
  return "?";
}

ScoreFunction::ScoreFunction(ScoreKind kind, std::shared_ptr<const CdeModel> model)
    : kind_(kind), model_(std::move(model)) {
  if (!model_) throw UsageError("ScoreFunction: null model");
  if (kind_ == ScoreKind::hpd)
    hpd_ = std::make_shared<HpdEvaluator>(model_, HpdEvaluator::Method::grid);
}

ScoreOrientation ScoreFunction::orientation() const {
  return kind_ == ScoreKind::cde_value ? ScoreOrientation::smaller_more_extreme
                                       : ScoreOrientation::larger_more_extreme;
}

double ScoreFunction::score(const Eigen::VectorXd& x, double y) const {
  switch (kind_) {
    case ScoreKind::hpd:
      return hpd_->hpd(x, y);
    case ScoreKind::cde_value:
      return model_->density(x, y);
    case ScoreKind::abs_residual:
      return std::fabs(y - model_->regression_mean(x));
  }
  throw UsageError("unreachable score kind");
}

std::vector<double> ScoreFunction::score_curve(const Eigen::VectorXd& x) const {
  const GridSpec& g = model_->grid();
  if (kind_ == ScoreKind::hpd) return hpd_->hpd_curve(x);
  std::vector<double> out(g.points);
  if (kind_ == ScoreKind::cde_value) {
    const GaussianMixture1D mixture = model_->conditional(x);
    for (int i = 0; i < g.points; ++i) out[i] = mixture.pdf(g.node(i));
  } else {
    const double mu = model_->regression_mean(x);
    for (int i = 0; i < g.points; ++i) out[i] = std::fabs(g.node(i) - mu);
  }
  return out;
}

double PredictionRegion::total_length() const {
  double len = 0.0;
  for (const Interval& iv : intervals) len += iv.hi - iv.lo;
  return len;
}

bool contains(const PredictionRegion& region, double y) {
  for (const Interval& iv : region.intervals) {
    if (y < iv.lo) return false;
    if (y <= iv.hi) return true;
  }
  return false;
}

LocalConformalPredictor::LocalConformalPredictor(
    std::shared_ptr<const PartitionModel> partition, ScoreFunction score,
    std::vector<std::vector<double>> group_scores)
    : partition_(std::move(partition)),
      score_(std::move(score)),
      group_scores_(std::move(group_scores)) {
  if (!partition_) throw UsageError("LocalConformalPredictor: null partition");
  if (static_cast<int>(group_scores_.size()) != partition_->group_count())
    throw UsageError("LocalConformalPredictor: group count mismatch");
  for (const auto& g : group_scores_)
    if (!std::is_sorted(g.begin(), g.end()))
      throw UsageError("LocalConformalPredictor: group scores must be sorted");
}

double LocalConformalPredictor::p_value_of_score(int group, double s) const {
  const std::vector<double>& cal = group_scores_.at(group);
  const auto m = static_cast<double>(cal.size());
  std::size_t at_least_as_extreme;
  if (score_.orientation() == ScoreOrientation::larger_more_extreme) {
    at_least_as_extreme =
        cal.end() - std::lower_bound(cal.begin(), cal.end(), s);
  } else {
    at_least_as_extreme =
        std::upper_bound(cal.begin(), cal.end(), s) - cal.begin();
  }
  return (static_cast<double>(at_least_as_extreme) + 1.0) / (m + 1.0);
}

ScoredQuery LocalConformalPredictor::prepare(const Eigen::VectorXd& x) const {
  ScoredQuery q;
  q.group = partition_->assign(x);
  q.curve = score_.score_curve(x);
  return q;
}

double LocalConformalPredictor::p_value(const Eigen::VectorXd& x, double y) const {
  const int group = partition_->assign(x);
  return p_value_of_score(group, score_.score(x, y));
}

PredictionRegion LocalConformalPredictor::region_from(const ScoredQuery& q,
                                                      double epsilon) const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw UsageError("region: epsilon must be in (0,1)");
  const GridSpec& g = score_.grid();
  PredictionRegion out;
  out.nominal_level = 1.0 - epsilon;
  out.group = q.group;
  int run_start = -1;
  for (int i = 0; i < g.points; ++i) {
    const bool in = p_value_of_score(q.group, q.curve[i]) > epsilon;
    if (in && run_start < 0) run_start = i;
    if (!in && run_start >= 0) {
      out.intervals.push_back({g.node(run_start), g.node(i - 1)});
      run_start = -1;
    }
  }
  if (run_start >= 0)
    out.intervals.push_back({g.node(run_start), g.node(g.points - 1)});
  if (!out.intervals.empty()) {
    out.touches_grid_boundary = out.intervals.front().lo == g.node(0) ||
                                out.intervals.back().hi == g.node(g.points - 1);
  }
  return out;
}

PredictionRegion LocalConformalPredictor::region(const Eigen::VectorXd& x,
                                                 double epsilon) const {
  return region_from(prepare(x), epsilon);
}

LocalConformalPredictor calibrate(std::shared_ptr<const PartitionModel> partition,
                                  ScoreFunction score, const Dataset& data,
                                  const std::vector<int>& calibration_indices,
                                  double epsilon_min) {
  if (!partition) throw UsageError("calibrate: null partition");
  if (!(epsilon_min > 0.0 && epsilon_min < 1.0))
    throw ConfigError("calibrate: epsilon_min must be in (0,1)");
  const int k = partition->group_count();
  std::vector<std::vector<double>> group_scores(k);
  for (int i : calibration_indices) {
    if (i < 0 || i >= data.n()) throw UsageError("calibrate: index out of range");
    const Eigen::VectorXd x = data.feature_row(i);
    group_scores[partition->assign(x)].push_back(score.score(x, data.response(i)));
  }
  const auto required =
      static_cast<std::size_t>(std::ceil(1.0 / epsilon_min - 1e-9)) - 1;
  for (int g = 0; g < k; ++g) {
    if (group_scores[g].size() < required)
      throw CalibrationError("group " + std::to_string(g) + " has " +
                             std::to_string(group_scores[g].size()) +
                             " calibration points; needs " +
                             std::to_string(required));
    std::sort(group_scores[g].begin(), group_scores[g].end());
  }
  return LocalConformalPredictor(std::move(partition), std::move(score),
                                 std::move(group_scores));
}

double p_value(const LocalConformalPredictor& predictor, const Eigen::VectorXd& x,
               double y) {
  return predictor.p_value(x, y);
}

PredictionRegion region(const LocalConformalPredictor& predictor,
                        const Eigen::VectorXd& x, double epsilon) {
  return predictor.region(x, epsilon);
}

}  // namespace mdsplit
