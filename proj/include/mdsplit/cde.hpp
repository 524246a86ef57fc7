#ifndef MDSPLIT_CDE_HPP_
#define MDSPLIT_CDE_HPP_

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "mdsplit/dataset.hpp"
#include "mdsplit/stats.hpp"

namespace mdsplit {

// Uniform response evaluation grid shared by density, HPD and prediction
// region code.
struct GridSpec {
  double min = 0.0;
  double max = 1.0;
  int points = 1001;

  double step() const { return (max - min) / static_cast<double>(points - 1); }
  double node(int i) const { return min + step() * static_cast<double>(i); }
  std::vector<double> nodes() const;

  // Default grid: [min(y) - pad*sd(y), max(y) + pad*sd(y)].
  static GridSpec from_responses(const Eigen::VectorXd& y, double pad_sds,
                                 int points);
};

// Predicted conditional law: a 1-D Gaussian mixture. A single-component
// mixture is the plain Gaussian case.
struct GaussianMixture1D {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> sds;

  int components() const { return static_cast<int>(weights.size()); }
  double pdf(double y) const;
  double cdf(double y) const;
  double mean() const;
};

struct GaussianLinearParams {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  // Nadaraya-Watson smoother of squared residuals (Gaussian kernel on raw
  // features).
  double bandwidth = 1.0;
  Eigen::MatrixXd smoother_x;
  Eigen::VectorXd smoother_sq_residuals;
  double variance_floor = 1e-12;

  double regression_mean(const Eigen::VectorXd& x) const;
  double variance_at(const Eigen::VectorXd& x) const;
};

struct EmSettings {
  int max_iterations = 200;
  double relative_tolerance = 1e-8;
  double variance_floor = 1e-12;
};

struct KnnMixtureParams {
  int neighbor_count = 0;
  int component_count = 2;
  EmSettings em;
  Standardizer standardizer;
  Eigen::MatrixXd train_features_std;
  Eigen::VectorXd train_responses;
};

// Deterministic EM for a 1-D Gaussian mixture: components initialized at
// the response quantiles (j + 0.5) / M, equal weights, pooled variance.
GaussianMixture1D fit_mixture_em(const std::vector<double>& responses, int m,
                                 const EmSettings& settings);

class CdeModel {
 public:
  enum class Variant { gaussian_linear, knn_mixture };

  CdeModel(GaussianLinearParams params, GridSpec grid);
  CdeModel(KnnMixtureParams params, GridSpec grid);

  Variant variant() const;
  int dim() const;
  const GridSpec& grid() const { return grid_; }

  // The predicted conditional density of Y given X = x.
  GaussianMixture1D conditional(const Eigen::VectorXd& x) const;
  double density(const Eigen::VectorXd& x, double y) const;
  double regression_mean(const Eigen::VectorXd& x) const;

  const GaussianLinearParams& gaussian_linear() const;
  const KnnMixtureParams& knn_mixture() const;

 private:
  std::variant<GaussianLinearParams, KnnMixtureParams> params_;
  GridSpec grid_;
};

double density(const CdeModel& model, const Eigen::VectorXd& x, double y);

struct CdeFitOptions {
  int grid_points = 1001;
  double grid_pad_sds = 3.0;
};

// OLS conditional mean plus kernel-smoothed conditional variance;
// bandwidth picked by validation log-density, ties toward the smaller one.
CdeModel fit_gaussian_linear(const Dataset& train, const Dataset& validation,
                             const std::vector<double>& bandwidth_grid,
                             const CdeFitOptions& options = {});

// Local M-component Gaussian mixture over the K nearest training
// neighbors (Euclidean distance on standardized features); K picked by
// validation log-density.
CdeModel fit_knn_mixture(const Dataset& train, const Dataset& validation,
                         const std::vector<int>& k_grid, int m,
                         const CdeFitOptions& options = {});

}  // namespace mdsplit

#endif  // MDSPLIT_CDE_HPP_
