#include "mdsplit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdsplit/errors.hpp"

namespace mdsplit {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSqrt2 = 1.41421356237309504880;
}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_pdf(double y, double mu, double sd) {
  const double z = (y - mu) / sd;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z) / sd;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_quantile(double p) {
  // PPND16 (Wichura 1988, algorithm AS 241).
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw UsageError("normal_quantile: p outside [0,1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double uniform_ks_statistic(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double di = static_cast<double>(i);
    worst = std::max(worst, std::max((di + 1.0) / n - samples[i],
                                     samples[i] - di / n));
  }
  return worst;
}

double ks_statistic_sorted(const std::vector<double>& cdf_at_sorted) {
  const double n = static_cast<double>(cdf_at_sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < cdf_at_sorted.size(); ++i) {
    const double di = static_cast<double>(i);
    worst = std::max(worst, std::max((di + 1.0) / n - cdf_at_sorted[i],
                                     cdf_at_sorted[i] - di / n));
  }
  return worst;
}

std::vector<double> pool_adjacent_violators(const std::vector<double>& values) {
  struct Block {
    double sum;
    int count;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() >= 2) {
      const Block& b = blocks[blocks.size() - 1];
      const Block& a = blocks[blocks.size() - 2];
      if (a.sum * b.count <= b.sum * a.count) break;  // means nondecreasing
      Block merged{a.sum + b.sum, a.count + b.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) {
    const double level = b.sum / b.count;
    for (int i = 0; i < b.count; ++i) out.push_back(level);
  }
  return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  Standardizer z;
  const int d = static_cast<int>(rows.cols());
  z.mean = rows.colwise().mean();
  z.sd = Eigen::VectorXd::Ones(d);
  for (int j = 0; j < d; ++j) {
    const double var =
        (rows.col(j).array() - z.mean(j)).square().sum() / rows.rows();
    const double sd = std::sqrt(var);
    z.sd(j) = (sd > 0.0) ? sd : 1.0;
  }
  return z;
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
  return (x - mean).cwiseQuotient(sd);
}

Eigen::MatrixXd Standardizer::apply_rows(const Eigen::MatrixXd& rows) const {
  Eigen::MatrixXd out = rows;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= sd.transpose().array();
  return out;
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw UsageError("sorted_quantile: empty input");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace mdsplit
