#ifndef MDSPLIT_GENERATORS_HPP_
#define MDSPLIT_GENERATORS_HPP_

#include <cstdint>
#include <string>

#include "mdsplit/dataset.hpp"
#include "mdsplit/rng.hpp"

namespace mdsplit {

enum class GeneratorId { example1, example2_surrogate };

GeneratorId generator_id_from_string(const std::string& name);
std::string to_string(GeneratorId id);

struct GeneratorConfig {
  GeneratorId id = GeneratorId::example1;
  int sample_count = 0;
  std::uint64_t seed = 0;
  // example2_surrogate only:
  int nuisance_dims = 0;
  double lambda_noise = 0.05;          // uniform half-width on the axis ratio
  double theta_noise = 0.08726646259971647;  // pi/36 half-width on the angle
  bool spread_is_sd = false;  // interpret the 0.25 in N(+-2.7, 0.25) as sd

  void validate() const;
};

Dataset generate(const GeneratorConfig& config);

// One-dimensional example: X ~ Unif(-4,4); Y - x is a truncated normal for
// |x| <= 2 and a scaled Student-t for |x| > 2, with scale/truncation/df
// varying in |x| - 2.
Dataset generate_example1(const GeneratorConfig& config);

// Tabular surrogate of the image study: 9 subpopulations over
// (axis ratio, angle) cells, responses from scaled bimodal mixtures whose
// shape is set by the angle and scale by the axis ratio. Group labels
// record the true cell, 3 * lambda_index + theta_index.
Dataset generate_example2_surrogate(const GeneratorConfig& config);

// Example-1 pieces, exposed for direct conditional sampling in tests.
double example1_sigma(double u);      // 1 + 1.5|u|
double example1_trunc_max(double u);  // 0.5 + log(2/|u|)
double example1_df(double u);         // (3-|u|)^3 + 2
double sample_example1_response(double x, Rng& rng);

// Example-2 pieces. Cell id = 3 * lambda_index + theta_index with
// lambda in {0.1, 0.4, 0.75} and theta in {pi/4, 2pi/3, 5pi/6}.
double example2_scale(int lambda_index);  // 0.5, 1, 2
double sample_example2_response(int cell, bool spread_is_sd, Rng& rng);

}  // namespace mdsplit

#endif  // MDSPLIT_GENERATORS_HPP_
