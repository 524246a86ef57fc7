#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "mdsplit/errors.hpp"
#include "mdsplit/generators.hpp"
#include "mdsplit/hpd.hpp"
#include "mdsplit/rng.hpp"

using namespace mdsplit;

namespace {

std::shared_ptr<const CdeModel> unit_variance_line(double a, double b,
                                                   GridSpec grid) {
  GaussianLinearParams p;
  p.intercept = a;
  p.coefficients = Eigen::VectorXd::Constant(1, b);
  p.bandwidth = 1.0;
  p.smoother_x = Eigen::MatrixXd::Zero(2, 1);
  p.smoother_x << -1.0, 1.0;
  p.smoother_sq_residuals = Eigen::VectorXd::Ones(2);
  p.variance_floor = 1e-12;
  return std::make_shared<const CdeModel>(std::move(p), grid);
}

// knn model whose neighborhoods reproduce a balanced +-2 mixture
std::shared_ptr<const CdeModel> two_bump_knn(GridSpec grid) {
  Rng rng(404);
  const int n = 1000;
  KnnMixtureParams p;
  p.neighbor_count = n;
  p.component_count = 2;
  p.em.variance_floor = 1e-8;
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform01();
    y(i) = (i % 2 == 0 ? -2.0 : 2.0) + rng.normal();
  }
  p.standardizer = Standardizer::fit(x);
  p.train_features_std = p.standardizer.apply_rows(x);
  p.train_responses = y;
  return std::make_shared<const CdeModel>(std::move(p), grid);
}

GaussianMixture1D standard_normal() {
  GaussianMixture1D mix;
  mix.weights = {1.0};
  mix.means = {0.0};
  mix.sds = {1.0};
  return mix;
}

}  // namespace

TEST_CASE("cell-split superlevel mass on a hand triangle") {
  // values (0, 1, 0): f >= 0.5 covers the middle half of both cells
  DensityGrid dg;
  dg.grid = {0.0, 2.0, 3};
  dg.values = {0.0, 1.0, 0.0};
  dg.total_mass = 1.0;
  CHECK(dg.mass_above(0.5) == doctest::Approx(0.75));  // 2 * (1+0.5)/2 * 0.5 * 1
  CHECK(dg.mass_above(0.0) == doctest::Approx(1.0));
  CHECK(dg.mass_above(1.0) == doctest::Approx(0.0));
  CHECK(dg.mass_above(2.0) == doctest::Approx(0.0));
}

TEST_CASE("sweep over all nodes matches per-level integration") {
  GaussianMixture1D mix;
  mix.weights = {0.35, 0.4, 0.25};
  mix.means = {-2.5, 0.5, 3.0};
  mix.sds = {0.8, 1.3, 0.5};
  const GridSpec grid{-9, 9, 801};
  const DensityGrid dg = DensityGrid::evaluate(mix, grid);
  const std::vector<double> sweep = dg.mass_above_all_nodes();
  for (int i = 0; i < grid.points; i += 7)
    CHECK(sweep[i] == doctest::Approx(dg.mass_above(dg.values[i])).epsilon(1e-12));
}

TEST_CASE("hpd at the conditional mode is zero") {
  const auto model = unit_variance_line(0.0, 1.0, {-10, 10, 1001});
  const HpdEvaluator grid_eval(model, HpdEvaluator::Method::grid);
  const HpdEvaluator analytic(model, HpdEvaluator::Method::analytic_gaussian);
  Eigen::VectorXd x(1);
  x << 1.5;
  CHECK(analytic.hpd(x, 1.5) == doctest::Approx(0.0));
  CHECK(grid_eval.hpd(x, 1.5) < 2e-3);
}

TEST_CASE("hpd at 1.96 sigma equals the two-sided normal mass") {
  const auto model = unit_variance_line(0.0, 0.0, {-10, 10, 1001});
  const HpdEvaluator grid_eval(model, HpdEvaluator::Method::grid);
  const HpdEvaluator analytic(model, HpdEvaluator::Method::analytic_gaussian);
  Eigen::VectorXd x(1);
  x << -0.7;
  // error-function oracle: 2 Phi(1.96) - 1
  CHECK(analytic.hpd(x, 1.96) == doctest::Approx(0.9500042097035591).epsilon(1e-10));
  CHECK(grid_eval.hpd(x, 1.96) == doctest::Approx(0.9500042097035591).epsilon(0.0005));
  CHECK(grid_eval.hpd(x, -1.96) == doctest::Approx(grid_eval.hpd(x, 1.96)).epsilon(1e-6));
}

TEST_CASE("analytic and grid methods agree on single Gaussians") {
  const auto model = unit_variance_line(0.3, 1.2, {-14, 14, 1001});
  const HpdEvaluator grid_eval(model, HpdEvaluator::Method::grid);
  const HpdEvaluator analytic(model, HpdEvaluator::Method::analytic_gaussian);
  Rng rng(9);
  for (int rep = 0; rep < 300; ++rep) {
    Eigen::VectorXd x(1);
    x << rng.uniform(-4.0, 4.0);
    const double y = 0.3 + 1.2 * x(0) + rng.uniform(-4.0, 4.0);
    CHECK(std::fabs(grid_eval.hpd(x, y) - analytic.hpd(x, y)) < 1e-3);
  }
}

TEST_CASE("bimodal superlevel sets are handled") {
  const auto model = two_bump_knn({-12, 12, 1201});
  const HpdEvaluator eval(model, HpdEvaluator::Method::grid);
  Eigen::VectorXd x(1);
  x << 0.5;
  const double at_valley = eval.hpd(x, 0.0);
  const double at_tail = eval.hpd(x, 10.0);
  CHECK(at_valley < at_tail);
  CHECK(at_tail >= 0.999);
  // the valley sits between the bumps: the superlevel set excludes a
  // non-trivial inner region, so its mass is well below 1
  CHECK(at_valley < 0.99);
}

TEST_CASE("analytic evaluator rejects mixtures") {
  const auto model = two_bump_knn({-12, 12, 301});
  CHECK_THROWS_AS(HpdEvaluator(model, HpdEvaluator::Method::analytic_gaussian),
                  UsageError);
}

TEST_CASE("hpd range and orientation") {
  const auto model = unit_variance_line(0.0, 1.0, {-12, 12, 801});
  const HpdEvaluator eval(model, HpdEvaluator::Method::grid);
  Rng rng(21);
  Eigen::VectorXd x(1);
  for (int rep = 0; rep < 200; ++rep) {
    x << rng.uniform(-3.0, 3.0);
    const double y = x(0) + rng.uniform(-6.0, 6.0);
    const double v = eval.hpd(x, y);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // monotone in density: closer to the mode means lower hpd
  x << 0.0;
  double prev = eval.hpd(x, 0.0);
  for (double y = 0.5; y <= 6.0; y += 0.5) {
    const double cur = eval.hpd(x, y);
    CHECK(cur >= prev - 1e-9);
    prev = cur;
  }
}

TEST_CASE("hpd is uniform when the data come from the model") {
  const auto model = unit_variance_line(0.0, 1.0, {-12, 12, 1001});
  const HpdEvaluator eval(model, HpdEvaluator::Method::grid);
  Rng rng(33);
  const int n = 10000;
  std::vector<double> values(n);
  Eigen::VectorXd x(1);
  for (int i = 0; i < n; ++i) {
    x << rng.uniform(-4.0, 4.0);
    values[i] = eval.hpd(x, x(0) + rng.normal());
  }
  CHECK(uniform_ks_statistic(values) < 0.02);
}

TEST_CASE("hpd_batch preserves order and propagates indices") {
  GeneratorConfig cfg;
  cfg.sample_count = 20;
  cfg.seed = 14;
  const Dataset data = generate_example1(cfg);
  const auto model = unit_variance_line(0.0, 1.0, {-60, 60, 2001});
  const HpdEvaluator eval(model, HpdEvaluator::Method::grid);

  CHECK(eval.hpd_batch(data, {}).empty());
  const std::vector<double> two = eval.hpd_batch(data, {3, 1});
  CHECK(two.size() == 2);
  CHECK(two[0] == doctest::Approx(eval.hpd(data.feature_row(3), data.response(3))));
  CHECK(two[1] == doctest::Approx(eval.hpd(data.feature_row(1), data.response(1))));
  CHECK_THROWS_AS(eval.hpd_batch(data, {99}), UsageError);
}

TEST_CASE("normalization failure names the query point") {
  // grid far away from the conditional mass
  const auto model = unit_variance_line(0.0, 0.0, {50, 60, 101});
  const HpdEvaluator eval(model, HpdEvaluator::Method::grid);
  Eigen::VectorXd x(1);
  x << 0.25;
  try {
    eval.hpd(x, 55.0);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(std::string(e.what()).find("0.25") != std::string::npos);
  }
}

TEST_CASE("hpd curve equals pointwise hpd on the grid") {
  const auto model = unit_variance_line(0.1, 0.9, {-12, 12, 501});
  const HpdEvaluator eval(model, HpdEvaluator::Method::grid);
  Eigen::VectorXd x(1);
  x << 2.0;
  const std::vector<double> curve = eval.hpd_curve(x);
  for (int i = 0; i < 501; i += 25)
    CHECK(curve[i] == doctest::Approx(eval.hpd(x, model->grid().node(i))).epsilon(1e-12));

  // analytic curve for the analytic evaluator
  const HpdEvaluator analytic(model, HpdEvaluator::Method::analytic_gaussian);
  const std::vector<double> acurve = analytic.hpd_curve(x);
  for (int i = 0; i < 501; i += 25)
    CHECK(std::fabs(acurve[i] - curve[i]) < 1e-3);
}

TEST_CASE("pdf values feed straight into mass_above for off-grid y") {
  GaussianMixture1D mix = standard_normal();
  const DensityGrid dg = DensityGrid::evaluate(mix, {-8, 8, 1001});
  // off-node query: compare with the error-function oracle
  const double y = 1.23456;
  const double oracle = std::erf(y / std::sqrt(2.0));
  CHECK(dg.mass_above(mix.pdf(y)) == doctest::Approx(oracle).epsilon(5e-4));
}
