#include "mdsplit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mdsplit/errors.hpp"

namespace mdsplit {

AlphaGrid::AlphaGrid(double step) : step_size(step) {
  if (!(step > 0.0 && step <= 1.0))
    throw ConfigError("alpha grid step must be in (0,1]");
  const int m = static_cast<int>(std::ceil(1.0 / step - 1e-12));
  levels.reserve(m + 1);
  for (int j = 0; j < m; ++j) levels.push_back(j * step);
  levels.push_back(1.0);
}

CoverageEstimator::CoverageEstimator(Eigen::MatrixXd diag_features_std,
                                     Standardizer standardizer,
                                     std::vector<double> diag_hpd,
                                     double bandwidth, AlphaGrid alpha_grid)
    : features_std_(std::move(diag_features_std)),
      standardizer_(std::move(standardizer)),
      hpd_(std::move(diag_hpd)),
      bandwidth_(bandwidth),
      alpha_grid_(std::move(alpha_grid)) {
  if (hpd_.empty()) throw ConfigError("coverage estimator: no diagnostic pairs");
  if (static_cast<Eigen::Index>(hpd_.size()) != features_std_.rows())
    throw UsageError("coverage estimator: feature/hpd length mismatch");
  if (!(bandwidth_ > 0.0)) throw ConfigError("coverage estimator: bandwidth must be > 0");
  for (double v : hpd_)
    if (!(v >= 0.0 && v <= 1.0))
      throw UsageError("coverage estimator: HPD value outside [0,1]");

  hpd_order_.resize(hpd_.size());
  std::iota(hpd_order_.begin(), hpd_order_.end(), 0);
  std::sort(hpd_order_.begin(), hpd_order_.end(),
            [&](int a, int b) { return hpd_[a] < hpd_[b]; });
  hpd_sorted_.reserve(hpd_.size());
  for (int i : hpd_order_) hpd_sorted_.push_back(hpd_[i]);

  unweighted_profile_.resize(alpha_grid_.size());
  for (int j = 0; j < alpha_grid_.size(); ++j) {
    const double alpha = alpha_grid_.levels[j];
    const auto below = std::lower_bound(hpd_sorted_.begin(), hpd_sorted_.end(),
                                        alpha) - hpd_sorted_.begin();
    unweighted_profile_(j) =
        static_cast<double>(below) / static_cast<double>(hpd_sorted_.size());
  }
}

CoverageProfile CoverageEstimator::raw_profile(const Eigen::VectorXd& x) const {
  if (x.size() != standardizer_.dim())
    throw UsageError("coverage profile: feature dimension mismatch");
  const Eigen::VectorXd xs = standardizer_.apply(x);
  const int n = static_cast<int>(features_std_.rows());
  const double inv2h2 = 0.5 / (bandwidth_ * bandwidth_);

  // weights in HPD-sorted order, then prefix sums so that each alpha is a
  // binary search over 1{HPD_i < alpha}
  std::vector<double> prefix(n + 1, 0.0);
  double total = 0.0;
  for (int r = 0; r < n; ++r) {
    const int i = hpd_order_[r];
    const double w =
        std::exp(-(features_std_.row(i).transpose() - xs).squaredNorm() * inv2h2);
    prefix[r + 1] = prefix[r] + w;
    total += w;
  }

  CoverageProfile out;
  out.values.resize(alpha_grid_.size());
  if (!(total > 0.0)) {
    out.values = unweighted_profile_;
    out.kernel_underflow = true;
    return out;
  }
  for (int j = 0; j < alpha_grid_.size(); ++j) {
    const double alpha = alpha_grid_.levels[j];
    const auto below = std::lower_bound(hpd_sorted_.begin(), hpd_sorted_.end(),
                                        alpha) - hpd_sorted_.begin();
    out.values(j) = prefix[below] / total;
  }
  return out;
}

CoverageProfile CoverageEstimator::profile(const Eigen::VectorXd& x) const {
  CoverageProfile p = raw_profile(x);
  std::vector<double> v(p.values.data(), p.values.data() + p.values.size());
  v = pool_adjacent_violators(v);
  for (std::size_t j = 0; j < v.size(); ++j)
    p.values(static_cast<Eigen::Index>(j)) = std::min(1.0, std::max(0.0, v[j]));
  p.values(0) = 0.0;
  p.values(p.values.size() - 1) = 1.0;
  return p;
}

CoverageEstimator fit_coverage_estimator(const CoverageDiagnosticSet& diagnostic,
                                         const CoverageDiagnosticSet& validation,
                                         const std::vector<double>& bandwidth_grid,
                                         const AlphaGrid& alpha_grid) {
  if (diagnostic.hpd_values.size() < 20)
    throw ConfigError("fit_coverage_estimator: need at least 20 diagnostic pairs");
  if (bandwidth_grid.empty())
    throw ConfigError("fit_coverage_estimator: empty bandwidth grid");
  for (double h : bandwidth_grid)
    if (!(h > 0.0))
      throw ConfigError("fit_coverage_estimator: bandwidths must be > 0");

  const Standardizer standardizer = Standardizer::fit(diagnostic.features);
  const Eigen::MatrixXd features_std = standardizer.apply_rows(diagnostic.features);

  std::vector<double> candidates(bandwidth_grid);
  std::sort(candidates.begin(), candidates.end());

  double best_score = std::numeric_limits<double>::infinity();
  double best_h = candidates.front();
  for (double h : candidates) {
    const CoverageEstimator est(features_std, standardizer,
                                diagnostic.hpd_values, h, alpha_grid);
    double brier = 0.0;
    for (Eigen::Index v = 0; v < validation.features.rows(); ++v) {
      const CoverageProfile raw = est.raw_profile(validation.features.row(v));
      for (int j = 0; j < alpha_grid.size(); ++j) {
        const double indicator =
            validation.hpd_values[v] < alpha_grid.levels[j] ? 1.0 : 0.0;
        const double diff = indicator - raw.values(j);
        brier += diff * diff;
      }
    }
    if (brier < best_score) {
      best_score = brier;
      best_h = h;
    }
  }
  return CoverageEstimator(features_std, standardizer, diagnostic.hpd_values,
                           best_h, alpha_grid);
}

}  // namespace mdsplit
