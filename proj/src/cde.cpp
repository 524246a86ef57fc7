#include "mdsplit/cde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mdsplit/errors.hpp"

namespace mdsplit {

std::vector<double> GridSpec::nodes() const {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) out[i] = node(i);
  return out;
}

GridSpec GridSpec::from_responses(const Eigen::VectorXd& y, double pad_sds,
                                  int points) {
  if (points < 3) throw ConfigError("grid needs at least 3 points");
  const double m = y.mean();
  const double sd = std::sqrt((y.array() - m).square().sum() / y.size());
  const double pad = pad_sds * (sd > 0.0 ? sd : 1.0);
  return GridSpec{y.minCoeff() - pad, y.maxCoeff() + pad, points};
}

double GaussianMixture1D::pdf(double y) const {
  double f = 0.0;
  for (int j = 0; j < components(); ++j)
    f += weights[j] * normal_pdf(y, means[j], sds[j]);
  return f;
}

double GaussianMixture1D::cdf(double y) const {
  double c = 0.0;
  for (int j = 0; j < components(); ++j)
    c += weights[j] * normal_cdf((y - means[j]) / sds[j]);
  return c;
}

double GaussianMixture1D::mean() const {
  double m = 0.0;
  for (int j = 0; j < components(); ++j) m += weights[j] * means[j];
  return m;
}

double GaussianLinearParams::regression_mean(const Eigen::VectorXd& x) const {
  return intercept + coefficients.dot(x);
}

double GaussianLinearParams::variance_at(const Eigen::VectorXd& x) const {
  const double inv2h2 = 0.5 / (bandwidth * bandwidth);
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < smoother_x.rows(); ++i) {
    const double d2 = (smoother_x.row(i).transpose() - x).squaredNorm();
    const double w = std::exp(-d2 * inv2h2);
    num += w * smoother_sq_residuals(i);
    den += w;
  }
  // all-weights-underflow far from the data: fall back to the mean
  // squared residual
  const double v = (den > 0.0) ? num / den : smoother_sq_residuals.mean();
  return std::max(v, variance_floor);
}

GaussianMixture1D fit_mixture_em(const std::vector<double>& responses, int m,
                                 const EmSettings& settings) {
  const int n = static_cast<int>(responses.size());
  if (m < 1) throw ConfigError("mixture needs at least one component");
  if (n < 1) throw UsageError("fit_mixture_em: empty response set");

  std::vector<double> sorted(responses);
  std::sort(sorted.begin(), sorted.end());
  const double pooled_var =
      std::max(variance(responses), settings.variance_floor);

  GaussianMixture1D mix;
  mix.weights.assign(m, 1.0 / m);
  mix.means.resize(m);
  mix.sds.assign(m, std::sqrt(pooled_var));
  for (int j = 0; j < m; ++j)
    mix.means[j] = sorted_quantile(sorted, (j + 0.5) / m);

  std::vector<double> resp(static_cast<std::size_t>(n) * m);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    // E step in log space
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      std::vector<double> lw(m);
      for (int j = 0; j < m; ++j) {
        const double z = (responses[i] - mix.means[j]) / mix.sds[j];
        lw[j] = (mix.weights[j] > 0.0 ? std::log(mix.weights[j])
                                      : -std::numeric_limits<double>::infinity()) -
                0.5 * z * z - std::log(mix.sds[j]) -
                0.91893853320467274178;  // log sqrt(2 pi)
        best = std::max(best, lw[j]);
      }
      double total = 0.0;
      for (int j = 0; j < m; ++j) total += std::exp(lw[j] - best);
      ll += best + std::log(total);
      for (int j = 0; j < m; ++j)
        resp[static_cast<std::size_t>(i) * m + j] = std::exp(lw[j] - best) / total;
    }
    // M step
    for (int j = 0; j < m; ++j) {
      double wsum = 0.0, msum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = resp[static_cast<std::size_t>(i) * m + j];
        wsum += r;
        msum += r * responses[i];
      }
      if (wsum > 0.0) {
        const double mu = msum / wsum;
        double vsum = 0.0;
        for (int i = 0; i < n; ++i) {
          const double r = resp[static_cast<std::size_t>(i) * m + j];
          vsum += r * (responses[i] - mu) * (responses[i] - mu);
        }
        mix.means[j] = mu;
        mix.sds[j] = std::sqrt(std::max(vsum / wsum, settings.variance_floor));
      }
      mix.weights[j] = wsum / n;
    }
    double wtotal = std::accumulate(mix.weights.begin(), mix.weights.end(), 0.0);
    for (double& w : mix.weights) w /= wtotal;

    if (std::fabs(ll - prev_ll) <=
        settings.relative_tolerance * (std::fabs(prev_ll) + 1.0))
      break;
    prev_ll = ll;
  }
  return mix;
}

CdeModel::CdeModel(GaussianLinearParams params, GridSpec grid)
    : params_(std::move(params)), grid_(grid) {}

CdeModel::CdeModel(KnnMixtureParams params, GridSpec grid)
    : params_(std::move(params)), grid_(grid) {}

CdeModel::Variant CdeModel::variant() const {
  return std::holds_alternative<GaussianLinearParams>(params_)
             ? Variant::gaussian_linear
             : Variant::knn_mixture;
}

int CdeModel::dim() const {
  if (const auto* gl = std::get_if<GaussianLinearParams>(&params_))
    return static_cast<int>(gl->coefficients.size());
  return std::get<KnnMixtureParams>(params_).standardizer.dim();
}

const GaussianLinearParams& CdeModel::gaussian_linear() const {
  if (const auto* gl = std::get_if<GaussianLinearParams>(&params_)) return *gl;
  throw UsageError("model is not gaussian_linear");
}

const KnnMixtureParams& CdeModel::knn_mixture() const {
  if (const auto* knn = std::get_if<KnnMixtureParams>(&params_)) return *knn;
  throw UsageError("model is not knn_mixture");
}

namespace {

// K nearest training rows by (squared distance, index); returns their
// responses sorted in that order so downstream sums are reproducible.
std::vector<double> neighbor_responses(const KnnMixtureParams& p,
                                       const Eigen::VectorXd& x_std) {
  const int n = static_cast<int>(p.train_features_std.rows());
  const int k = std::min(p.neighbor_count, n);
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i)
    dist[i] = {(p.train_features_std.row(i).transpose() - x_std).squaredNorm(), i};
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  std::sort(dist.begin(), dist.begin() + k);
  std::vector<double> ys(k);
  for (int i = 0; i < k; ++i) ys[i] = p.train_responses(dist[i].second);
  return ys;
}

}  // namespace

GaussianMixture1D CdeModel::conditional(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw UsageError("conditional: feature dimension mismatch");
  if (const auto* gl = std::get_if<GaussianLinearParams>(&params_)) {
    GaussianMixture1D mix;
    mix.weights = {1.0};
    mix.means = {gl->regression_mean(x)};
    mix.sds = {std::sqrt(gl->variance_at(x))};
    return mix;
  }
  const auto& knn = std::get<KnnMixtureParams>(params_);
  const std::vector<double> ys =
      neighbor_responses(knn, knn.standardizer.apply(x));
  return fit_mixture_em(ys, knn.component_count, knn.em);
}

double CdeModel::density(const Eigen::VectorXd& x, double y) const {
  return conditional(x).pdf(y);
}

double CdeModel::regression_mean(const Eigen::VectorXd& x) const {
  if (const auto* gl = std::get_if<GaussianLinearParams>(&params_))
    return gl->regression_mean(x);
  return conditional(x).mean();
}

double density(const CdeModel& model, const Eigen::VectorXd& x, double y) {
  return model.density(x, y);
}

namespace {

double validation_log_density(const CdeModel& model, const Dataset& validation) {
  double ll = 0.0;
  for (int i = 0; i < validation.n(); ++i) {
    const double f = model.density(validation.feature_row(i), validation.response(i));
    if (f <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += std::log(f);
  }
  return ll;
}

}  // namespace

CdeModel fit_gaussian_linear(const Dataset& train, const Dataset& validation,
                             const std::vector<double>& bandwidth_grid,
                             const CdeFitOptions& options) {
  const int n = train.n();
  const int d = train.dim();
  if (n < d + 2) throw FitError("fit_gaussian_linear: need at least d+2 rows");
  if (bandwidth_grid.empty())
    throw ConfigError("fit_gaussian_linear: empty bandwidth grid");
  for (double h : bandwidth_grid)
    if (!(h > 0.0)) throw ConfigError("fit_gaussian_linear: bandwidths must be > 0");

  Eigen::MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = train.features();
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < d + 1) throw FitError("fit_gaussian_linear: singular design matrix");
  const Eigen::VectorXd beta = qr.solve(train.responses());

  const Eigen::VectorXd residuals = train.responses() - design * beta;
  const double var_y =
      (train.responses().array() - train.responses().mean()).square().sum() / n;

  GaussianLinearParams params;
  params.intercept = beta(0);
  params.coefficients = beta.tail(d);
  params.smoother_x = train.features();
  params.smoother_sq_residuals = residuals.array().square();
  params.variance_floor = std::max(1e-6 * var_y, 1e-12);

  const GridSpec grid = GridSpec::from_responses(
      train.responses(), options.grid_pad_sds, options.grid_points);

  std::vector<double> candidates(bandwidth_grid);
  std::sort(candidates.begin(), candidates.end());
  double best_ll = -std::numeric_limits<double>::infinity();
  double best_h = candidates.front();
  for (double h : candidates) {
    params.bandwidth = h;
    const double ll =
        validation_log_density(CdeModel(params, grid), validation);
    if (ll > best_ll) {
      best_ll = ll;
      best_h = h;
    }
  }
  if (validation.n() > 0 && std::isinf(best_ll) && best_ll < 0)
    throw FitError("fit_gaussian_linear: every bandwidth gives -inf validation log-density");

  params.bandwidth = best_h;
  return CdeModel(std::move(params), grid);
}

CdeModel fit_knn_mixture(const Dataset& train, const Dataset& validation,
                         const std::vector<int>& k_grid, int m,
                         const CdeFitOptions& options) {
  if (m < 1) throw ConfigError("fit_knn_mixture: M must be >= 1");
  if (k_grid.empty()) throw ConfigError("fit_knn_mixture: empty K grid");
  for (int k : k_grid) {
    if (k < 2 * m) throw ConfigError("fit_knn_mixture: K below 2M");
    if (k > train.n()) throw ConfigError("fit_knn_mixture: K exceeds training rows");
  }

  const double var_y =
      (train.responses().array() - train.responses().mean()).square().sum() /
      train.n();

  KnnMixtureParams params;
  params.component_count = m;
  params.em.variance_floor = std::max(1e-6 * var_y, 1e-12);
  params.standardizer = Standardizer::fit(train.features());
  params.train_features_std = params.standardizer.apply_rows(train.features());
  params.train_responses = train.responses();

  const GridSpec grid = GridSpec::from_responses(
      train.responses(), options.grid_pad_sds, options.grid_points);

  std::vector<int> candidates(k_grid);
  std::sort(candidates.begin(), candidates.end());
  double best_ll = -std::numeric_limits<double>::infinity();
  int best_k = candidates.front();
  for (int k : candidates) {
    params.neighbor_count = k;
    const double ll =
        validation_log_density(CdeModel(params, grid), validation);
    if (ll > best_ll) {
      best_ll = ll;
      best_k = k;
    }
  }
  if (validation.n() > 0 && std::isinf(best_ll) && best_ll < 0)
    throw FitError("fit_knn_mixture: every K gives -inf validation log-density");

  params.neighbor_count = best_k;
  return CdeModel(std::move(params), grid);
}

}  // namespace mdsplit
