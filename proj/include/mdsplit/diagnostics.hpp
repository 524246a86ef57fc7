#ifndef MDSPLIT_DIAGNOSTICS_HPP_
#define MDSPLIT_DIAGNOSTICS_HPP_

#include <Eigen/Dense>
#include <vector>

#include "mdsplit/stats.hpp"

namespace mdsplit {

// Levels {0, delta, 2*delta, ..., 1}; both endpoints are always included
// exactly, so the grid has ceil(1/delta) + 1 points.
struct AlphaGrid {
  explicit AlphaGrid(double step);
  double step_size;
  std::vector<double> levels;
  int size() const { return static_cast<int>(levels.size()); }
};

// Per-point local coverage curve: entry j estimates the probability that
// the HPD value at this x falls below level alpha_j. Nondecreasing with
// endpoints pinned at 0 and 1.
struct CoverageProfile {
  Eigen::VectorXd values;
  bool kernel_underflow = false;  // fell back to the unweighted mean profile
};

struct CoverageDiagnosticSet {
  Eigen::MatrixXd features;       // raw
  std::vector<double> hpd_values;  // in [0,1]
};

// Kernel-smoothed binary regression of the indicators 1{HPD < alpha} on a
// shared alpha grid: one Gaussian-kernel bandwidth (on standardized
// features) across all levels, selected on validation pairs by mean Brier
// score.
class CoverageEstimator {
 public:
  CoverageEstimator(Eigen::MatrixXd diag_features_std, Standardizer standardizer,
                    std::vector<double> diag_hpd, double bandwidth,
                    AlphaGrid alpha_grid);

  CoverageProfile profile(const Eigen::VectorXd& x) const;

  // Raw Nadaraya-Watson estimates before monotonization/clamping.
  CoverageProfile raw_profile(const Eigen::VectorXd& x) const;

  const AlphaGrid& alpha_grid() const { return alpha_grid_; }
  double bandwidth() const { return bandwidth_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const Eigen::MatrixXd& diag_features_std() const { return features_std_; }
  const std::vector<double>& diag_hpd() const { return hpd_; }

 private:
  Eigen::MatrixXd features_std_;
  Standardizer standardizer_;
  std::vector<double> hpd_;
  double bandwidth_;
  AlphaGrid alpha_grid_;
  // diag points ordered by HPD value so each profile is one weight pass
  // plus a prefix-sum lookup per level
  std::vector<int> hpd_order_;
  std::vector<double> hpd_sorted_;
  Eigen::VectorXd unweighted_profile_;
};

CoverageEstimator fit_coverage_estimator(const CoverageDiagnosticSet& diagnostic,
                                         const CoverageDiagnosticSet& validation,
                                         const std::vector<double>& bandwidth_grid,
                                         const AlphaGrid& alpha_grid);

}  // namespace mdsplit

#endif  // MDSPLIT_DIAGNOSTICS_HPP_
