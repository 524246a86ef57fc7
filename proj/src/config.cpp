#include "mdsplit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdsplit/errors.hpp"

namespace mdsplit {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("key '" + key + "': bad numeric value '" + value + "'");
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>)
      out += fmt17(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
  KeyValueFile kv;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (kv.values_.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
    kv.values_[key] = value;
    kv.consumed_[key] = false;
  }
  return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_text(text.str());
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueFile::get_string(const std::string& key,
                                     const std::string& fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  return it->second;
}

double KeyValueFile::get_double(const std::string& key, double fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  return to_double(key, it->second);
}

int KeyValueFile::get_int(const std::string& key, int fallback) {
  const double v = get_double(key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("key '" + key + "': expected an integer");
  return i;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  std::uint64_t v = 0;
  const std::string& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("key '" + key + "': bad unsigned value '" + s + "'");
  return v;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false");
}

std::vector<double> KeyValueFile::get_double_list(const std::string& key,
                                                  std::vector<double> fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_double(key, trim(cell)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::vector<int> KeyValueFile::get_int_list(const std::string& key,
                                            std::vector<int> fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  std::vector<int> out;
  std::stringstream ss(it->second);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const double v = to_double(key, trim(cell));
    if (v != static_cast<int>(v))
      throw ConfigError("key '" + key + "': expected integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

void KeyValueFile::reject_unknown_keys() const {
  std::string unknown;
  for (const auto& [key, used] : consumed_)
    if (!used) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  KeyValueFile kv = KeyValueFile::parse_file(path);
  return from_kv(kv);
}

ExperimentConfig ExperimentConfig::from_kv(KeyValueFile& kv) {
  ExperimentConfig cfg;
  cfg.source = kv.get_string("data.source", cfg.source);
  cfg.generator.id =
      generator_id_from_string(kv.get_string("data.generator", "example1"));
  cfg.generator.sample_count = kv.get_int("data.n", 4000);
  cfg.generator.nuisance_dims = kv.get_int("data.nuisance_dims", 0);
  cfg.generator.lambda_noise =
      kv.get_double("data.lambda_noise", cfg.generator.lambda_noise);
  cfg.generator.theta_noise =
      kv.get_double("data.theta_noise", cfg.generator.theta_noise);
  const std::string spread =
      kv.get_string("data.component_spread", "variance");
  if (spread != "variance" && spread != "sd")
    throw ConfigError("data.component_spread must be 'variance' or 'sd'");
  cfg.generator.spread_is_sd = spread == "sd";
  cfg.data_path = kv.get_string("data.path", "");
  cfg.test_path = kv.get_string("data.test_path", "");

  cfg.fractions.train = kv.get_double("split.train", cfg.fractions.train);
  cfg.fractions.validation =
      kv.get_double("split.validation", cfg.fractions.validation);
  cfg.fractions.diagnostic =
      kv.get_double("split.diagnostic", cfg.fractions.diagnostic);
  cfg.fractions.calibration =
      kv.get_double("split.calibration", cfg.fractions.calibration);

  cfg.cde_variant = kv.get_string("cde.variant", cfg.cde_variant);
  cfg.bandwidth_grid = kv.get_double_list("cde.bandwidth_grid", cfg.bandwidth_grid);
  cfg.k_grid = kv.get_int_list("cde.k_grid", cfg.k_grid);
  cfg.mixture_components = kv.get_int("cde.components", cfg.mixture_components);
  cfg.grid_points = kv.get_int("cde.grid_points", cfg.grid_points);
  cfg.grid_pad_sds = kv.get_double("cde.grid_pad_sds", cfg.grid_pad_sds);

  cfg.alpha_step = kv.get_double("diagnostics.alpha_step", cfg.alpha_step);
  cfg.coverage_bandwidth_grid = kv.get_double_list("diagnostics.bandwidth_grid",
                                                   cfg.coverage_bandwidth_grid);

  cfg.method =
      partition_method_from_string(kv.get_string("partition.method", "md"));
  cfg.cluster_count = kv.get_int("partition.k", cfg.cluster_count);
  cfg.kmeans_restarts = kv.get_int("partition.restarts", cfg.kmeans_restarts);

  if (kv.has("conformal.score"))
    cfg.score = score_kind_from_string(kv.get_string("conformal.score", ""));
  cfg.epsilon_min = kv.get_double("conformal.epsilon_min", cfg.epsilon_min);

  cfg.test_n = kv.get_int("eval.test_n", cfg.test_n);
  cfg.levels = kv.get_double_list("eval.levels", cfg.levels);
  cfg.bin_count = kv.get_int("eval.bins", cfg.bin_count);

  cfg.seed = kv.get_u64("seed", cfg.seed);

  kv.reject_unknown_keys();
  cfg.validate();
  return cfg;
}

ScoreKind ExperimentConfig::effective_score() const {
  if (score) return *score;
  return method == PartitionMethod::cd ? ScoreKind::cde_value : ScoreKind::hpd;
}

SplitFractions ExperimentConfig::effective_fractions() const {
  if (method != PartitionMethod::cd) return fractions;
  SplitFractions f = fractions;
  const double tv = f.train + f.validation;
  if (tv <= 0.0)
    throw ConfigError("cd method: train+validation fractions must be positive");
  f.train += f.diagnostic * (f.train / tv);
  f.validation += f.diagnostic * (f.validation / tv);
  f.diagnostic = 0.0;
  return f;
}

void ExperimentConfig::validate() const {
  if (source != "generate" && source != "file")
    throw ConfigError("data.source must be 'generate' or 'file'");
  if (source == "file" && (data_path.empty() || test_path.empty()))
    throw ConfigError("data.source=file needs data.path and data.test_path");
  if (source == "generate") generator.validate();
  if (cde_variant != "gaussian_linear" && cde_variant != "knn_mixture")
    throw ConfigError("cde.variant must be gaussian_linear or knn_mixture");
  if (mixture_components < 1) throw ConfigError("cde.components must be >= 1");
  if (grid_points < 3) throw ConfigError("cde.grid_points must be >= 3");
  if (cluster_count < 1) throw ConfigError("partition.k must be >= 1");
  if (kmeans_restarts < 1) throw ConfigError("partition.restarts must be >= 1");
  if (!(epsilon_min > 0.0 && epsilon_min < 1.0))
    throw ConfigError("conformal.epsilon_min must be in (0,1)");
  if (test_n < 1) throw ConfigError("eval.test_n must be >= 1");
  if (levels.empty()) throw ConfigError("eval.levels must be nonempty");
  for (double lv : levels)
    if (!(lv > 0.0 && lv < 1.0)) throw ConfigError("eval.levels must be in (0,1)");
  if (bin_count < 2) throw ConfigError("eval.bins must be >= 2");
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  out << "data.source = " << source << "\n";
  if (source == "generate") {
    out << "data.generator = " << to_string(generator.id) << "\n";
    out << "data.n = " << generator.sample_count << "\n";
    if (generator.id == GeneratorId::example2_surrogate) {
      out << "data.nuisance_dims = " << generator.nuisance_dims << "\n";
      out << "data.lambda_noise = " << fmt17(generator.lambda_noise) << "\n";
      out << "data.theta_noise = " << fmt17(generator.theta_noise) << "\n";
      out << "data.component_spread = "
          << (generator.spread_is_sd ? "sd" : "variance") << "\n";
    }
  } else {
    out << "data.path = " << data_path << "\n";
    out << "data.test_path = " << test_path << "\n";
  }
  out << "split.train = " << fmt17(fractions.train) << "\n";
  out << "split.validation = " << fmt17(fractions.validation) << "\n";
  out << "split.diagnostic = " << fmt17(fractions.diagnostic) << "\n";
  out << "split.calibration = " << fmt17(fractions.calibration) << "\n";
  out << "cde.variant = " << cde_variant << "\n";
  if (cde_variant == "gaussian_linear")
    out << "cde.bandwidth_grid = " << join(bandwidth_grid) << "\n";
  else
    out << "cde.k_grid = " << join(k_grid) << "\n";
  out << "cde.components = " << mixture_components << "\n";
  out << "cde.grid_points = " << grid_points << "\n";
  out << "cde.grid_pad_sds = " << fmt17(grid_pad_sds) << "\n";
  out << "diagnostics.alpha_step = " << fmt17(alpha_step) << "\n";
  out << "diagnostics.bandwidth_grid = " << join(coverage_bandwidth_grid) << "\n";
  out << "partition.method = " << to_string(method) << "\n";
  out << "partition.k = " << cluster_count << "\n";
  out << "partition.restarts = " << kmeans_restarts << "\n";
  out << "conformal.score = " << to_string(effective_score()) << "\n";
  out << "conformal.epsilon_min = " << fmt17(epsilon_min) << "\n";
  out << "eval.test_n = " << test_n << "\n";
  out << "eval.levels = " << join(levels) << "\n";
  out << "eval.bins = " << bin_count << "\n";
  out << "seed = " << seed << "\n";
  return out.str();
}

}  // namespace mdsplit
