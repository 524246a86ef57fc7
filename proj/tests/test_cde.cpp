#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdsplit/cde.hpp"
#include "mdsplit/errors.hpp"
#include "mdsplit/generators.hpp"
#include "mdsplit/rng.hpp"

using namespace mdsplit;

namespace {

// gaussian_linear model with mean a + b*x and constant unit variance
CdeModel unit_variance_line(double a, double b, GridSpec grid) {
  GaussianLinearParams p;
  p.intercept = a;
  p.coefficients = Eigen::VectorXd::Constant(1, b);
  p.bandwidth = 1.0;
  p.smoother_x = Eigen::MatrixXd::Zero(2, 1);
  p.smoother_x << -1.0, 1.0;
  p.smoother_sq_residuals = Eigen::VectorXd::Ones(2);
  p.variance_floor = 1e-12;
  return CdeModel(std::move(p), grid);
}

Dataset filter_cell(const Dataset& data, int cell) {
  std::vector<int> idx;
  for (int i = 0; i < data.n(); ++i)
    if (data.group_labels()[i] == cell) idx.push_back(i);
  return data.subset(idx);
}

double grid_mass(const CdeModel& model, const Eigen::VectorXd& x) {
  const GaussianMixture1D mix = model.conditional(x);
  const GridSpec& g = model.grid();
  double mass = 0.0;
  for (int i = 0; i + 1 < g.points; ++i)
    mass += 0.5 * (mix.pdf(g.node(i)) + mix.pdf(g.node(i + 1)));
  return mass * g.step();
}

}  // namespace

TEST_CASE("density closed-form oracles") {
  SUBCASE("standard normal mode: 1/sqrt(2 pi)") {
    const CdeModel model = unit_variance_line(0.0, 0.0, {-8, 8, 1001});
    Eigen::VectorXd x(1);
    x << 0.3;
    CHECK(density(model, x, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(density(model, x, 1.0) == doctest::Approx(density(model, x, -1.0)).epsilon(1e-14));
  }
  SUBCASE("equal-weight mixture of N(+-2,1) at 0 equals phi(2)") {
    GaussianMixture1D mix;
    mix.weights = {0.5, 0.5};
    mix.means = {-2.0, 2.0};
    mix.sds = {1.0, 1.0};
    CHECK(mix.pdf(0.0) == doctest::Approx(0.05399096651318806).epsilon(1e-12));
  }
}

TEST_CASE("fit_gaussian_linear recovers a noiseless line") {
  Eigen::MatrixXd x(20, 1);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = i + 1;
    y(i) = 2.0 * (i + 1);
  }
  const Dataset train(x, y);
  const CdeModel model = fit_gaussian_linear(train, train, {0.5, 1.0});
  CHECK(std::fabs(model.gaussian_linear().coefficients(0) - 2.0) < 1e-8);
  CHECK(std::fabs(model.gaussian_linear().intercept) < 1e-8);
}

TEST_CASE("fit_gaussian_linear variance on homoskedastic data") {
  // Monte Carlo oracle: y = x + N(0,1) so sigma^2(x) = 1 everywhere.
  Rng rng(17);
  const int n = 2000;
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform(-3.0, 3.0);
    y(i) = x(i, 0) + rng.normal();
  }
  std::vector<int> head, tail;
  for (int i = 0; i < n; ++i) (i < n / 2 ? head : tail).push_back(i);
  const Dataset all(x, y);
  const Dataset train = all.subset(head);
  const Dataset validation = all.subset(tail);
  const CdeModel model =
      fit_gaussian_linear(train, validation, {0.1, 0.2, 0.4, 0.8});
  for (double q = -2.4; q <= 2.4; q += 0.3) {
    Eigen::VectorXd at(1);
    at << q;
    const double var = model.gaussian_linear().variance_at(at);
    CHECK(var > 0.8);
    CHECK(var < 1.2);
  }
}

TEST_CASE("fit_gaussian_linear on example1 finds unit slope") {
  GeneratorConfig cfg;
  cfg.sample_count = 2000;
  cfg.seed = 4;
  const Dataset data = generate_example1(cfg);
  std::vector<int> head, tail;
  for (int i = 0; i < data.n(); ++i) (i < 1000 ? head : tail).push_back(i);
  const CdeModel model = fit_gaussian_linear(data.subset(head), data.subset(tail),
                                             {0.1, 0.2, 0.4, 0.8});
  CHECK(model.gaussian_linear().coefficients(0) > 0.9);
  CHECK(model.gaussian_linear().coefficients(0) < 1.1);
}

TEST_CASE("fit_gaussian_linear error paths") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(10, 1);  // constant feature
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(10, 0, 1);
  const Dataset degenerate(x, y);
  CHECK_THROWS_AS(fit_gaussian_linear(degenerate, degenerate, {0.5}), FitError);

  Eigen::MatrixXd x2(10, 1);
  for (int i = 0; i < 10; ++i) x2(i, 0) = i;
  const Dataset fine(x2, y);
  CHECK_THROWS_AS(fit_gaussian_linear(fine, fine, {}), ConfigError);
  CHECK_THROWS_AS(fit_gaussian_linear(fine, fine, {-1.0}), ConfigError);
}

TEST_CASE("em on a degenerate neighborhood spikes at the shared value") {
  EmSettings em;
  em.variance_floor = 1e-10;
  const std::vector<double> ys(50, 3.25);
  const GaussianMixture1D mix = fit_mixture_em(ys, 1, em);
  CHECK(mix.pdf(3.25) > mix.pdf(3.2));
  CHECK(mix.pdf(3.25) > mix.pdf(4.0));
  CHECK(mix.means[0] == doctest::Approx(3.25));
}

TEST_CASE("em weights sum to one and variances respect the floor") {
  Rng rng(5);
  EmSettings em;
  em.variance_floor = 1e-8;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> ys(120);
    for (double& v : ys) v = rng.normal() + (rng.uniform01() < 0.5 ? -2.0 : 2.0);
    const GaussianMixture1D mix = fit_mixture_em(ys, 3, em);
    double total = 0.0;
    for (double w : mix.weights) total += w;
    CHECK(std::fabs(total - 1.0) < 1e-12);
    for (double sd : mix.sds) CHECK(sd * sd >= em.variance_floor * (1 - 1e-12));
  }
}

TEST_CASE("knn mixture recovers the pi/4 cell components") {
  GeneratorConfig cfg;
  cfg.id = GeneratorId::example2_surrogate;
  cfg.sample_count = 9000;
  cfg.seed = 31;
  const Dataset data = generate_example2_surrogate(cfg);
  std::vector<int> head, tail;
  for (int i = 0; i < data.n(); ++i) (i < 6000 ? head : tail).push_back(i);
  const CdeModel model = fit_knn_mixture(data.subset(head), data.subset(tail),
                                         {500}, 2);
  Eigen::VectorXd x(2);
  x << 0.4, M_PI / 4;  // cell with true components N(-2,1), N(2,1)
  GaussianMixture1D mix = model.conditional(x);
  std::sort(mix.means.begin(), mix.means.end());
  CHECK(std::fabs(mix.means[0] + 2.0) < 0.3);
  CHECK(std::fabs(mix.means[1] - 2.0) < 0.3);
}

TEST_CASE("M=2 is outperformed by M=4 on the four-component cell") {
  GeneratorConfig cfg;
  cfg.id = GeneratorId::example2_surrogate;
  cfg.sample_count = 18000;
  cfg.seed = 12;
  const Dataset data = generate_example2_surrogate(cfg);
  const Dataset cell = filter_cell(data, 5);  // lambda=0.4, theta=5pi/6
  std::vector<int> head, tail;
  for (int i = 0; i < cell.n(); ++i) (i % 2 == 0 ? head : tail).push_back(i);
  const Dataset train = cell.subset(head);
  const Dataset validation = cell.subset(tail);

  const CdeModel m2 = fit_knn_mixture(train, validation, {400}, 2);
  const CdeModel m4 = fit_knn_mixture(train, validation, {400}, 4);
  double ll2 = 0.0, ll4 = 0.0;
  for (int i = 0; i < validation.n(); ++i) {
    ll2 += std::log(m2.density(validation.feature_row(i), validation.response(i)));
    ll4 += std::log(m4.density(validation.feature_row(i), validation.response(i)));
  }
  CHECK(ll2 < ll4);
}

TEST_CASE("knn configuration errors") {
  GeneratorConfig cfg;
  cfg.id = GeneratorId::example2_surrogate;
  cfg.sample_count = 200;
  cfg.seed = 3;
  const Dataset data = generate_example2_surrogate(cfg);
  CHECK_THROWS_AS(fit_knn_mixture(data, data, {3}, 2), ConfigError);    // K < 2M
  CHECK_THROWS_AS(fit_knn_mixture(data, data, {500}, 2), ConfigError);  // K > n
  CHECK_THROWS_AS(fit_knn_mixture(data, data, {}, 2), ConfigError);
  CHECK_THROWS_AS(fit_knn_mixture(data, data, {50}, 0), ConfigError);
}

TEST_CASE("grid-integrated density stays within [0.98, 1.02]") {
  GeneratorConfig cfg;
  cfg.sample_count = 1200;
  cfg.seed = 9;
  const Dataset data = generate_example1(cfg);
  std::vector<int> head, tail;
  for (int i = 0; i < data.n(); ++i) (i < 600 ? head : tail).push_back(i);
  const CdeModel model = fit_gaussian_linear(data.subset(head), data.subset(tail),
                                             {0.1, 0.2, 0.4, 0.8});
  Rng rng(55);
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd x(1);
    x << rng.uniform(-4.0, 4.0);
    const double mass = grid_mass(model, x);
    CHECK(mass > 0.98);
    CHECK(mass < 1.02);
  }
}

TEST_CASE("density is continuous along the grid") {
  const CdeModel model = unit_variance_line(0.0, 1.0, {-9, 9, 2001});
  Eigen::VectorXd x(1);
  x << 0.7;
  const GaussianMixture1D mix = model.conditional(x);
  // |f'| <= 0.242 / sd^2 for a Gaussian; allow the spec's 10x slack
  double lipschitz = 0.0;
  for (int j = 0; j < mix.components(); ++j)
    lipschitz += mix.weights[j] * 0.242 / (mix.sds[j] * mix.sds[j]);
  const double h = model.grid().step();
  double prev = mix.pdf(model.grid().node(0));
  for (int i = 1; i < model.grid().points; ++i) {
    const double cur = mix.pdf(model.grid().node(i));
    CHECK(std::fabs(cur - prev) <= 10.0 * h * lipschitz);
    prev = cur;
  }
}

TEST_CASE("fits are deterministic") {
  GeneratorConfig cfg;
  cfg.sample_count = 400;
  cfg.seed = 77;
  const Dataset data = generate_example1(cfg);
  std::vector<int> head, tail;
  for (int i = 0; i < data.n(); ++i) (i < 200 ? head : tail).push_back(i);
  const Dataset train = data.subset(head);
  const Dataset validation = data.subset(tail);
  const CdeModel a = fit_gaussian_linear(train, validation, {0.1, 0.3, 0.9});
  const CdeModel b = fit_gaussian_linear(train, validation, {0.9, 0.3, 0.1});
  CHECK(a.gaussian_linear().bandwidth == b.gaussian_linear().bandwidth);
  CHECK(a.gaussian_linear().intercept == b.gaussian_linear().intercept);
  CHECK(a.gaussian_linear().coefficients == b.gaussian_linear().coefficients);
}

TEST_CASE("dimension mismatch raises a usage error") {
  const CdeModel model = unit_variance_line(0.0, 1.0, {-9, 9, 101});
  Eigen::VectorXd x(2);
  x << 0.0, 1.0;
  CHECK_THROWS_AS(model.density(x, 0.0), UsageError);
}
