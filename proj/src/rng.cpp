#include "mdsplit/rng.hpp"

#include <cmath>
#include <limits>

#include "mdsplit/errors.hpp"
#include "mdsplit/stats.hpp"

namespace mdsplit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw UsageError("Rng::below(0)");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  // uniform01 can return exactly 0; shift into (0,1).
  double u;
  do {
    u = uniform01();
  } while (u <= 0.0);
  return normal_quantile(u);
}

double Rng::exponential() {
  double u;
  do {
    u = uniform01();
  } while (u <= 0.0);
  return -std::log(u);
}

double Rng::gamma(double shape) {
  if (shape < 1.0) throw UsageError("Rng::gamma requires shape >= 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

double Rng::student_t(double df) {
  if (df <= 2.0 / 3.0) throw UsageError("Rng::student_t: df too small");
  const double z = normal();
  const double chi2 = 2.0 * gamma(0.5 * df);
  return z / std::sqrt(chi2 / df);
}

double Rng::truncated_normal(double sigma, double lo, double hi) {
  if (!(sigma > 0.0)) throw UsageError("truncated_normal: sigma must be > 0");
  if (!(lo < hi)) throw UsageError("truncated_normal: empty interval");
  const double a = lo / sigma;
  const double b = hi / sigma;
  const double ca = std::isinf(a) ? 0.0 : normal_cdf(a);
  const double cb = std::isinf(b) ? 1.0 : normal_cdf(b);
  double u;
  double p;
  do {
    u = uniform01();
    p = ca + u * (cb - ca);
  } while (!(p > 0.0 && p < 1.0));
  return sigma * normal_quantile(p);
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& stage) {
  return splitmix64(master ^ fnv1a(stage));
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& stage,
                          std::uint64_t index) {
  return splitmix64(derive_seed(master, stage) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace mdsplit
