#ifndef MDSPLIT_EVAL_HPP_
#define MDSPLIT_EVAL_HPP_

#include <string>
#include <vector>

#include "mdsplit/conformal.hpp"
#include "mdsplit/dataset.hpp"

namespace mdsplit {

struct CoverageStratum {
  std::string label;
  double lo = std::numeric_limits<double>::quiet_NaN();  // x-bin bounds
  double hi = std::numeric_limits<double>::quiet_NaN();
  int count = 0;
  // achieved coverage per nominal level; NaN when the stratum is empty
  std::vector<double> achieved;
};

struct CoverageReport {
  std::string stratification;  // marginal | x-bin | true-group | assigned-cluster
  std::vector<double> levels;  // nominal coverage levels (1 - epsilon)
  std::vector<CoverageStratum> strata;
  int test_count = 0;

  // count-weighted mean of per-stratum achieved coverage
  double pooled_achieved(std::size_t level_index) const;
  double max_abs_deviation(std::size_t level_index) const;
  double mean_abs_deviation(std::size_t level_index) const;
};

// Pre-computed per-point coverage flags so several stratifications reuse
// one pass of region construction.
struct CoverageFlags {
  std::vector<double> levels;
  std::vector<int> assigned_group;
  // covered[i * levels.size() + l]
  std::vector<char> covered;
};

CoverageFlags evaluate_coverage(const LocalConformalPredictor& predictor,
                                const Dataset& test,
                                const std::vector<double>& levels);

CoverageReport coverage_marginal(const CoverageFlags& flags);
// Equal-width bins over the observed range of the single feature.
CoverageReport coverage_by_bins(const CoverageFlags& flags, const Dataset& test,
                                int bin_count);
CoverageReport coverage_by_groups(const CoverageFlags& flags, const Dataset& test);
CoverageReport coverage_by_clusters(const CoverageFlags& flags, int group_count);

// Convenience wrappers that evaluate the predictor directly.
CoverageReport coverage_by_bins(const LocalConformalPredictor& predictor,
                                const Dataset& test, int bin_count,
                                const std::vector<double>& levels);
CoverageReport coverage_by_groups(const LocalConformalPredictor& predictor,
                                  const Dataset& test,
                                  const std::vector<double>& levels);

struct MethodComparison {
  std::string name;
  std::vector<double> mean_abs_deviation;  // per level
  std::vector<double> max_abs_deviation;
  CoverageReport report;
};

struct ComparisonTable {
  std::vector<double> levels;
  std::vector<MethodComparison> methods;
};

ComparisonTable compare(
    const std::vector<std::pair<std::string, const LocalConformalPredictor*>>& methods,
    const Dataset& test, const std::string& stratification, int bin_count,
    const std::vector<double>& levels);

// Writes <base>.csv, <base>_curves.svg and <base>_heatmap.svg.
// Byte-deterministic given the report.
void render_report(const CoverageReport& report, const std::string& base_path);

void write_comparison(const ComparisonTable& table, const std::string& path);

}  // namespace mdsplit

#endif  // MDSPLIT_EVAL_HPP_
