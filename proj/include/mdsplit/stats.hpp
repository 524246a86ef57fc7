#ifndef MDSPLIT_STATS_HPP_
#define MDSPLIT_STATS_HPP_

#include <Eigen/Dense>
#include <vector>

namespace mdsplit {

double normal_pdf(double z);                      // standard normal density
double normal_pdf(double y, double mu, double sd);
double normal_cdf(double z);                      // Phi via erfc
// Inverse standard normal CDF (Wichura's PPND16 rational approximation,
// ~1e-15 absolute accuracy over (0,1)).
double normal_quantile(double p);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);    // population variance
double sample_sd(const std::vector<double>& v);   // n-1 denominator

// Kolmogorov-Smirnov statistic of a sample against Uniform(0,1).
double uniform_ks_statistic(std::vector<double> samples);

// Kolmogorov-Smirnov statistic against an arbitrary CDF given as sorted
// sample values and their model CDF values.
double ks_statistic_sorted(const std::vector<double>& cdf_at_sorted);

// Isotonic regression by pool-adjacent-violators (equal weights);
// returns the nondecreasing vector closest to `values` in L2.
std::vector<double> pool_adjacent_violators(const std::vector<double>& values);

// Per-dimension affine map to zero mean / unit sd. Constant dimensions
// keep sd 1 so they standardize to zero offsets.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;

  static Standardizer fit(const Eigen::MatrixXd& rows);
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& rows) const;
  int dim() const { return static_cast<int>(mean.size()); }
};

// Linear-interpolation (type-7) quantile of a sorted vector, q in [0,1].
double sorted_quantile(const std::vector<double>& sorted, double q);

}  // namespace mdsplit

#endif  // MDSPLIT_STATS_HPP_
