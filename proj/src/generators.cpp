#include "mdsplit/generators.hpp"

#include <cmath>
#include <limits>

#include "mdsplit/errors.hpp"

namespace mdsplit {

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kLambdaValues[3] = {0.1, 0.4, 0.75};
const double kThetaValues[3] = {kPi / 4.0, 2.0 * kPi / 3.0, 5.0 * kPi / 6.0};
}  // namespace

GeneratorId generator_id_from_string(const std::string& name) {
  if (name == "example1") return GeneratorId::example1;
  if (name == "example2_surrogate") return GeneratorId::example2_surrogate;
  throw ConfigError("unknown generator '" + name +
                    "' (valid: example1, example2_surrogate)");
}

std::string to_string(GeneratorId id) {
  return id == GeneratorId::example1 ? "example1" : "example2_surrogate";
}

void GeneratorConfig::validate() const {
  if (sample_count <= 0) throw ConfigError("generator: sample count must be > 0");
  if (nuisance_dims < 0) throw ConfigError("generator: nuisance_dims must be >= 0");
  if (lambda_noise < 0.0 || theta_noise < 0.0)
    throw ConfigError("generator: noise half-widths must be >= 0");
}

Dataset generate(const GeneratorConfig& config) {
  config.validate();
  return config.id == GeneratorId::example1 ? generate_example1(config)
                                            : generate_example2_surrogate(config);
}

double example1_sigma(double u) { return 1.0 + 1.5 * std::fabs(u); }

double example1_trunc_max(double u) {
  const double a = std::fabs(u);
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 + std::log(2.0 / a);
}

double example1_df(double u) {
  const double a = std::fabs(u);
  return (3.0 - a) * (3.0 - a) * (3.0 - a) + 2.0;
}

double sample_example1_response(double x, Rng& rng) {
  const double u = std::fabs(x) - 2.0;
  const double sigma = example1_sigma(u);
  if (std::fabs(x) <= 2.0) {
    const double bound = sigma * example1_trunc_max(u);
    return x + rng.truncated_normal(sigma, -bound, bound);
  }
  return x + 0.5 * sigma * rng.student_t(example1_df(u));
}

Dataset generate_example1(const GeneratorConfig& config) {
  config.validate();
  const int n = config.sample_count;
  Rng rng(config.seed);
  Eigen::MatrixXd features(n, 1);
  Eigen::VectorXd responses(n);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(-4.0, 4.0);
    features(i, 0) = x;
    responses(i) = sample_example1_response(x, rng);
  }
  return Dataset(std::move(features), std::move(responses));
}

double example2_scale(int lambda_index) {
  switch (lambda_index) {
    case 0: return 0.5;
    case 1: return 1.0;
    case 2: return 2.0;
  }
  throw UsageError("example2_scale: lambda index outside 0..2");
}

double sample_example2_response(int cell, bool spread_is_sd, Rng& rng) {
  if (cell < 0 || cell > 8) throw UsageError("example2 cell outside 0..8");
  const int theta_index = cell % 3;
  const double scale = example2_scale(cell / 3);
  const double side = rng.uniform01() < 0.5 ? 1.0 : -1.0;  // U vs V branch
  double w = 0.0;
  switch (theta_index) {
    case 0:  // N(+-2, 1)
      w = side * 2.0 + rng.normal();
      break;
    case 1:  // Exponential(1) centered at +-2, i.e. (E - 1) +- 2
      w = side * 2.0 + (rng.exponential() - 1.0);
      break;
    case 2: {  // equal mixture of N(+-2.7, 0.25) and N(+-1.3, 0.25)
      const double center = rng.uniform01() < 0.5 ? 2.7 : 1.3;
      const double sd = spread_is_sd ? 0.25 : 0.5;
      w = side * center + sd * rng.normal();
      break;
    }
  }
  return scale * w;
}

Dataset generate_example2_surrogate(const GeneratorConfig& config) {
  config.validate();
  const int n = config.sample_count;
  const int d = 2 + config.nuisance_dims;
  Rng rng(config.seed);
  Eigen::MatrixXd features(n, d);
  Eigen::VectorXd responses(n);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const int cell = static_cast<int>(rng.below(9));
    const int lambda_index = cell / 3;
    const int theta_index = cell % 3;
    features(i, 0) = kLambdaValues[lambda_index] +
                     rng.uniform(-config.lambda_noise, config.lambda_noise);
    features(i, 1) = kThetaValues[theta_index] +
                     rng.uniform(-config.theta_noise, config.theta_noise);
    for (int j = 0; j < config.nuisance_dims; ++j)
      features(i, 2 + j) = rng.uniform01();
    responses(i) = sample_example2_response(cell, config.spread_is_sd, rng);
    labels[i] = cell;
  }
  return Dataset(std::move(features), std::move(responses), std::move(labels));
}

}  // namespace mdsplit
