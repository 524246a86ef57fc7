#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "mdsplit/dataset.hpp"
#include "mdsplit/errors.hpp"
#include "mdsplit/generators.hpp"
#include "mdsplit/stats.hpp"

using namespace mdsplit;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

bool disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> sa(a.begin(), a.end());
  for (int v : b)
    if (sa.count(v)) return false;
  return true;
}

}  // namespace

TEST_CASE("dataset invariants enforced") {
  Eigen::MatrixXd f(2, 1);
  f << 0, 1;
  Eigen::VectorXd y(2);
  y << 1, 2;
  CHECK_NOTHROW(Dataset(f, y));
  Eigen::VectorXd bad_len(3);
  bad_len << 1, 2, 3;
  CHECK_THROWS_AS(Dataset(f, bad_len), UsageError);
  Eigen::VectorXd with_nan(2);
  with_nan << 1, std::nan("");
  CHECK_THROWS_AS(Dataset(f, with_nan), UsageError);
  CHECK_THROWS_AS(Dataset(f, y, std::vector<int>{0, -1}), UsageError);
  CHECK_THROWS_AS(Dataset(f, y).group_labels(), UsageError);
}

TEST_CASE("split: sizes, disjointness, determinism") {
  GeneratorConfig cfg;
  cfg.sample_count = 100;
  cfg.seed = 7;
  const Dataset data = generate_example1(cfg);

  SUBCASE("quarter split gives four sets of 25") {
    const SplitIndices s = split(data, {0.25, 0.25, 0.25, 0.25}, 7);
    CHECK(s.train.size() == 25);
    CHECK(s.validation.size() == 25);
    CHECK(s.diagnostic.size() == 25);
    CHECK(s.calibration.size() == 25);
    CHECK(disjoint(s.train, s.validation));
    CHECK(disjoint(s.train, s.diagnostic));
    CHECK(disjoint(s.train, s.calibration));
    CHECK(disjoint(s.validation, s.diagnostic));
    CHECK(disjoint(s.validation, s.calibration));
    CHECK(disjoint(s.diagnostic, s.calibration));
  }

  SUBCASE("degenerate split puts everything in train") {
    const SplitIndices s = split(data, {1.0, 0.0, 0.0, 0.0}, 3);
    CHECK(s.train.size() == 100);
    CHECK(s.validation.empty());
    CHECK(s.diagnostic.empty());
    CHECK(s.calibration.empty());
  }

  SUBCASE("repeated execution with one seed is identical") {
    GeneratorConfig c99 = cfg;
    c99.sample_count = 99;
    const Dataset d99 = generate_example1(c99);
    const SplitIndices a = split(d99, {0.33, 0.33, 0.0, 0.33}, 11);
    const SplitIndices b = split(d99, {0.33, 0.33, 0.0, 0.33}, 11);
    CHECK(a.train == b.train);
    CHECK(a.validation == b.validation);
    CHECK(a.diagnostic == b.diagnostic);
    CHECK(a.calibration == b.calibration);
    CHECK(a.train.size() == 32);  // floor(0.33 * 99)
  }

  SUBCASE("fraction errors") {
    CHECK_THROWS_AS(split(data, {0.5, 0.5, 0.5, 0.0}, 1), ConfigError);
    CHECK_THROWS_AS(split(data, {-0.1, 0.5, 0.0, 0.0}, 1), ConfigError);
  }
}

TEST_CASE("example1 helper functions as printed") {
  CHECK(example1_sigma(0.0) == doctest::Approx(1.0));
  CHECK(example1_sigma(-2.0) == doctest::Approx(4.0));
  CHECK(example1_df(1.0) == doctest::Approx(10.0));
  CHECK(example1_df(-1.0) == doctest::Approx(10.0));
  CHECK(example1_trunc_max(-2.0) == doctest::Approx(0.5));
  CHECK(std::isinf(example1_trunc_max(0.0)));
}

TEST_CASE("example1 conditional at x=0 is symmetric about 0") {
  // Monte Carlo oracle: truncated normal centered at x.
  Rng rng(101);
  const int n = 100000;
  double s = 0.0;
  double lo = 1e30, hi = -1e30;
  for (int i = 0; i < n; ++i) {
    const double y = sample_example1_response(0.0, rng);
    s += y;
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  CHECK(s / n == doctest::Approx(0.0).epsilon(0.05));
  // bounds: sigma(|0|-2)=4, trunc_max=0.5 -> +-2
  CHECK(lo >= -2.0);
  CHECK(hi <= 2.0);
}

TEST_CASE("example1 X marginal is Unif(-4,4)") {
  GeneratorConfig cfg;
  cfg.sample_count = 100000;
  cfg.seed = 5;
  const Dataset data = generate_example1(cfg);
  std::vector<double> u(data.n());
  for (int i = 0; i < data.n(); ++i) u[i] = (data.features()(i, 0) + 4.0) / 8.0;
  CHECK(uniform_ks_statistic(u) < 0.01);
}

TEST_CASE("example1 t branch has fat tails beyond the truncation branch") {
  Rng rng(77);
  int extreme = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double y = sample_example1_response(3.9, rng);  // df near 3
    if (std::fabs(y - 3.9) > 8.0) ++extreme;
  }
  CHECK(extreme > 0);
}

TEST_CASE("example1 determinism is bit exact") {
  GeneratorConfig cfg;
  cfg.sample_count = 500;
  cfg.seed = 99;
  const Dataset a = generate_example1(cfg);
  const Dataset b = generate_example1(cfg);
  CHECK(a.features() == b.features());
  CHECK(a.responses() == b.responses());
}

TEST_CASE("example2 surrogate cell structure") {
  GeneratorConfig cfg;
  cfg.id = GeneratorId::example2_surrogate;
  cfg.sample_count = 100000;
  cfg.seed = 21;
  const Dataset data = generate_example2_surrogate(cfg);
  REQUIRE(data.has_group_labels());
  CHECK(data.dim() == 2);

  SUBCASE("each of the 9 cells receives 10.5%..11.7% of draws") {
    std::vector<int> counts(9, 0);
    for (int g : data.group_labels()) {
      REQUIRE(g >= 0);
      REQUIRE(g < 9);
      ++counts[g];
    }
    for (int c : counts) {
      const double share = static_cast<double>(c) / data.n();
      CHECK(share > 0.105);
      CHECK(share < 0.117);
    }
  }

  SUBCASE("features sit near their cell centers") {
    const double lambda_centers[3] = {0.1, 0.4, 0.75};
    const double theta_centers[3] = {M_PI / 4, 2 * M_PI / 3, 5 * M_PI / 6};
    for (int i = 0; i < 1000; ++i) {
      const int cell = data.group_labels()[i];
      CHECK(std::fabs(data.features()(i, 0) - lambda_centers[cell / 3]) <=
            cfg.lambda_noise + 1e-12);
      CHECK(std::fabs(data.features()(i, 1) - theta_centers[cell % 3]) <=
            cfg.theta_noise + 1e-12);
    }
  }
}

TEST_CASE("example2 moment oracles") {
  CHECK(example2_scale(2) == doctest::Approx(2.0));  // lambda = 0.75

  Rng rng(13);
  const int n = 100000;
  SUBCASE("cell (lambda=0.4, theta=pi/4): mean 0") {
    double s = 0;
    for (int i = 0; i < n; ++i) s += sample_example2_response(3, false, rng);
    CHECK(std::fabs(s / n) < 0.05);
  }
  SUBCASE("cell (lambda=0.1, theta=pi/4): variance 0.25*(1+4) = 1.25") {
    // mixture-variance oracle: var = a^2 (within-var + between-var)
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = sample_example2_response(0, false, rng);
    CHECK(variance(z) == doctest::Approx(1.25).epsilon(0.04));
  }
  SUBCASE("exponential cells have mean 0 and means at +-2 per side") {
    double s = 0;
    for (int i = 0; i < n; ++i) s += sample_example2_response(4, false, rng);
    CHECK(std::fabs(s / n) < 0.05);
  }
  SUBCASE("four-component cell: modes around +-2.7 and +-1.3") {
    int outer = 0, total = 20000;
    for (int i = 0; i < total; ++i) {
      const double z = sample_example2_response(2, false, rng);  // lambda=0.1
      if (std::fabs(std::fabs(z) - 0.5 * 2.7) < std::fabs(std::fabs(z) - 0.5 * 1.3))
        ++outer;
    }
    CHECK(outer == doctest::Approx(total / 2).epsilon(0.05));
  }
}

TEST_CASE("example2 nuisance dims are Unif(0,1)") {
  GeneratorConfig cfg;
  cfg.id = GeneratorId::example2_surrogate;
  cfg.sample_count = 20000;
  cfg.seed = 2;
  cfg.nuisance_dims = 3;
  const Dataset data = generate_example2_surrogate(cfg);
  CHECK(data.dim() == 5);
  std::vector<double> u(data.n());
  for (int i = 0; i < data.n(); ++i) u[i] = data.features()(i, 4);
  CHECK(uniform_ks_statistic(u) < 0.015);
}

TEST_CASE("csv round trip") {
  SUBCASE("tiny literal file") {
    const std::string path = temp_path("mdsplit_tiny.csv");
    {
      std::ofstream out(path);
      out << "x1,y\n0,1\n";
    }
    const Dataset d = read_dataset(path);
    CHECK(d.n() == 1);
    CHECK(d.dim() == 1);
    CHECK(d.features()(0, 0) == 0.0);
    CHECK(d.response(0) == 1.0);
    std::remove(path.c_str());
  }

  SUBCASE("write then read reproduces the generator output exactly") {
    GeneratorConfig cfg;
    cfg.sample_count = 50;
    cfg.seed = 31;
    const Dataset d = generate_example1(cfg);
    const std::string path = temp_path("mdsplit_rt.csv");
    write_dataset(d, path);
    const Dataset r = read_dataset(path);
    REQUIRE(r.n() == d.n());
    CHECK((r.features() - d.features()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.responses() - d.responses()).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
  }

  SUBCASE("group labels survive the round trip") {
    GeneratorConfig cfg;
    cfg.id = GeneratorId::example2_surrogate;
    cfg.sample_count = 40;
    cfg.seed = 8;
    const Dataset d = generate_example2_surrogate(cfg);
    const std::string path = temp_path("mdsplit_rt2.csv");
    write_dataset(d, path);
    const Dataset r = read_dataset(path);
    CHECK(r.group_labels() == d.group_labels());
    std::remove(path.c_str());
  }

  SUBCASE("malformed rows name the line") {
    const std::string path = temp_path("mdsplit_bad.csv");
    {
      std::ofstream out(path);
      out << "x1,y\na,b\n";
    }
    try {
      read_dataset(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line_number == 2);
    }
    {
      std::ofstream out(path);
      out << "x1,y\n1,2\n3\n";
    }
    try {
      read_dataset(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line_number == 3);
    }
    std::remove(path.c_str());
  }

  SUBCASE("unknown header rejected") {
    const std::string path = temp_path("mdsplit_hdr.csv");
    {
      std::ofstream out(path);
      out << "a,b\n1,2\n";
    }
    CHECK_THROWS_AS(read_dataset(path), ParseError);
    std::remove(path.c_str());
  }
}
