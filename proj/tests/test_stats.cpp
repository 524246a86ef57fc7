#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdsplit/rng.hpp"
#include "mdsplit/stats.hpp"

using namespace mdsplit;

TEST_CASE("normal quantile matches reference values") {
  // Reference values from an independent implementation of Phi^-1.
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.3) == doctest::Approx(-0.5244005127080409).epsilon(1e-12));
  CHECK(normal_quantile(1e-6) == doctest::Approx(-4.753424308822899).epsilon(1e-12));
  CHECK(normal_quantile(1e-12) == doctest::Approx(-7.034483825301131).epsilon(1e-12));
}

TEST_CASE("normal quantile inverts normal cdf") {
  for (double z = -6.0; z <= 6.0; z += 0.37) {
    CHECK(normal_quantile(normal_cdf(z)) == doctest::Approx(z).epsilon(1e-10));
  }
}

TEST_CASE("pool adjacent violators") {
  SUBCASE("hand-computed merge") {
    const std::vector<double> raw{0.0, 0.6, 0.4, 1.0};
    const std::vector<double> iso = pool_adjacent_violators(raw);
    REQUIRE(iso.size() == 4);
    CHECK(iso[0] == doctest::Approx(0.0));
    CHECK(iso[1] == doctest::Approx(0.5));
    CHECK(iso[2] == doctest::Approx(0.5));
    CHECK(iso[3] == doctest::Approx(1.0));
  }
  SUBCASE("already monotone is unchanged") {
    const std::vector<double> raw{0.1, 0.4, 0.9};
    CHECK(pool_adjacent_violators(raw) == raw);
  }
  SUBCASE("all decreasing pools to the mean") {
    const std::vector<double> iso = pool_adjacent_violators({3.0, 2.0, 1.0});
    for (double v : iso) CHECK(v == doctest::Approx(2.0));
  }
  SUBCASE("output is nondecreasing on random input") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> raw(20);
      for (double& v : raw) v = rng.uniform01();
      const std::vector<double> iso = pool_adjacent_violators(raw);
      for (std::size_t i = 1; i < iso.size(); ++i) CHECK(iso[i] >= iso[i - 1]);
      // PAV preserves the total
      double sr = 0, si = 0;
      for (std::size_t i = 0; i < raw.size(); ++i) sr += raw[i], si += iso[i];
      CHECK(si == doctest::Approx(sr).epsilon(1e-12));
    }
  }
}

TEST_CASE("ks statistic detects uniform vs shifted") {
  Rng rng(42);
  std::vector<double> u(20000);
  for (double& v : u) v = rng.uniform01();
  CHECK(uniform_ks_statistic(u) < 0.015);
  for (double& v : u) v = v * v;  // clearly non-uniform
  CHECK(uniform_ks_statistic(u) > 0.2);
}

TEST_CASE("rng samplers match their target moments") {
  Rng rng(7);
  const int n = 200000;
  SUBCASE("normal") {
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      s += z;
      s2 += z * z;
    }
    CHECK(s / n == doctest::Approx(0.0).epsilon(0.01));
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("exponential") {
    double s = 0;
    for (int i = 0; i < n; ++i) s += rng.exponential();
    CHECK(s / n == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("student t df=5 variance df/(df-2)") {
    double s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double t = rng.student_t(5.0);
      s2 += t * t;
    }
    CHECK(s2 / n == doctest::Approx(5.0 / 3.0).epsilon(0.1));
  }
  SUBCASE("truncated normal stays in bounds and is symmetric") {
    double s = 0;
    for (int i = 0; i < n / 4; ++i) {
      const double v = rng.truncated_normal(2.0, -1.0, 1.0);
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
      s += v;
    }
    CHECK(s / (n / 4) == doctest::Approx(0.0).epsilon(0.02));
  }
}

TEST_CASE("truncated normal with one infinite bound") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.truncated_normal(
        1.0, 0.5, std::numeric_limits<double>::infinity());
    CHECK(v >= 0.5);
  }
}

TEST_CASE("uniform01 KS against U(0,1)") {
  Rng rng(123);
  std::vector<double> u(100000);
  for (double& v : u) v = rng.uniform01();
  CHECK(uniform_ks_statistic(u) < 0.01);
}

TEST_CASE("derive_seed separates stages and is stable") {
  const auto a = derive_seed(7, "data");
  const auto b = derive_seed(7, "test");
  const auto c = derive_seed(8, "data");
  CHECK(a != b);
  CHECK(a != c);
  CHECK(derive_seed(7, "data") == a);
  CHECK(derive_seed(7, "data", 0) != derive_seed(7, "data", 1));
}

TEST_CASE("standardizer centers and scales") {
  Eigen::MatrixXd rows(4, 2);
  rows << 1, 10, 2, 10, 3, 10, 4, 10;
  const Standardizer z = Standardizer::fit(rows);
  CHECK(z.mean(0) == doctest::Approx(2.5));
  CHECK(z.sd(1) == doctest::Approx(1.0));  // constant column guard
  const Eigen::MatrixXd s = z.apply_rows(rows);
  CHECK(s.col(0).mean() == doctest::Approx(0.0));
  CHECK(s.col(1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("sorted quantile interpolates") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(sorted_quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(sorted_quantile(v, 1.0) == doctest::Approx(4.0));
  CHECK(sorted_quantile(v, 0.5) == doctest::Approx(2.5));
}
