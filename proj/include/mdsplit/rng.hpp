#ifndef MDSPLIT_RNG_HPP_
#define MDSPLIT_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mdsplit {

// Deterministic random source. All variates are derived from raw
// mt19937_64 words through fixed arithmetic, never through the
// implementation-defined std::*_distribution adaptors, so a seed pins the
// exact stream on every platform we build on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in {0, ..., n-1} by rejection on the top range.
  std::uint64_t below(std::uint64_t n);

  // Standard normal by inverse CDF.
  double normal();

  // Exponential with rate 1.
  double exponential();

  // Gamma(shape, scale 1) for shape >= 1 (Marsaglia-Tsang squeeze).
  double gamma(double shape);

  // Student-t with (real) df > 0 as normal / sqrt(chi2/df).
  double student_t(double df);

  // Normal with sd `sigma` conditioned on [lo, hi], by inverse CDF on the
  // truncated interval. Bounds may be infinite.
  double truncated_normal(double sigma, double lo, double hi);

  // Deterministic Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Stable stage-name seed derivation: FNV-1a over the name mixed into the
// master seed through splitmix64. Lets every pipeline stage be re-run in
// isolation with a reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, const std::string& stage);
std::uint64_t derive_seed(std::uint64_t master, const std::string& stage,
                          std::uint64_t index);

}  // namespace mdsplit

#endif  // MDSPLIT_RNG_HPP_
