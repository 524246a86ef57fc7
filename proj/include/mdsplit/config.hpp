#ifndef MDSPLIT_CONFIG_HPP_
#define MDSPLIT_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdsplit/conformal.hpp"
#include "mdsplit/dataset.hpp"
#include "mdsplit/generators.hpp"
#include "mdsplit/partition.hpp"

namespace mdsplit {

// Flat "key = value" file with dotted section names, '#' comments and
// mandatory key validation (unknown keys are configuration errors).
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback);
  std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback);

  // Throws ConfigError if any key was never consumed by a getter.
  void reject_unknown_keys() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> consumed_;
};

struct ExperimentConfig {
  // data
  std::string source = "generate";  // generate | file
  GeneratorConfig generator;
  std::string data_path;
  std::string test_path;
  SplitFractions fractions{0.25, 0.25, 0.25, 0.25};
  // cde
  std::string cde_variant = "gaussian_linear";  // gaussian_linear | knn_mixture
  std::vector<double> bandwidth_grid{0.05, 0.1, 0.2, 0.35, 0.6, 1.0};
  std::vector<int> k_grid{125, 250, 500};
  int mixture_components = 2;
  int grid_points = 1001;
  double grid_pad_sds = 3.0;
  // diagnostics
  double alpha_step = 0.02;
  std::vector<double> coverage_bandwidth_grid{0.02, 0.05, 0.1, 0.15, 0.25, 0.5};
  // partition
  PartitionMethod method = PartitionMethod::md;
  int cluster_count = 5;
  int kmeans_restarts = 10;
  // conformal
  std::optional<ScoreKind> score;  // absent: method default
  double epsilon_min = 0.05;
  // eval
  int test_n = 5000;
  std::vector<double> levels{0.5, 0.8, 0.9};
  int bin_count = 20;

  std::uint64_t seed = 1;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_kv(KeyValueFile& kv);

  // md -> hpd, cd -> cde_value, euclidean/global -> hpd
  ScoreKind effective_score() const;
  // cd folds the diagnostic fraction into train+validation, keeping their
  // relative proportion
  SplitFractions effective_fractions() const;
  void validate() const;

  // Canonical deterministic rendering, written as the provenance sidecar.
  std::string canonical_text() const;
};

}  // namespace mdsplit

#endif  // MDSPLIT_CONFIG_HPP_
