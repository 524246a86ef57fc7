#include "mdsplit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mdsplit/errors.hpp"

namespace mdsplit {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

double binomial_band(double level, int count) {
  if (count <= 0) return std::numeric_limits<double>::quiet_NaN();
  return 3.0 * std::sqrt(level * (1.0 - level) / static_cast<double>(count));
}

CoverageReport tabulate(const CoverageFlags& flags,
                        const std::vector<int>& stratum_of,
                        std::vector<CoverageStratum> strata,
                        const std::string& stratification) {
  const std::size_t l = flags.levels.size();
  std::vector<std::vector<int>> hits(strata.size(), std::vector<int>(l, 0));
  for (std::size_t i = 0; i < stratum_of.size(); ++i) {
    const int s = stratum_of[i];
    if (s < 0) continue;
    ++strata[s].count;
    for (std::size_t j = 0; j < l; ++j)
      hits[s][j] += flags.covered[i * l + j] ? 1 : 0;
  }
  for (std::size_t s = 0; s < strata.size(); ++s) {
    strata[s].achieved.assign(l, std::numeric_limits<double>::quiet_NaN());
    if (strata[s].count == 0) continue;
    for (std::size_t j = 0; j < l; ++j)
      strata[s].achieved[j] =
          static_cast<double>(hits[s][j]) / static_cast<double>(strata[s].count);
  }
  CoverageReport report;
  report.stratification = stratification;
  report.levels = flags.levels;
  report.strata = std::move(strata);
  report.test_count = static_cast<int>(stratum_of.size());
  return report;
}

}  // namespace

double CoverageReport::pooled_achieved(std::size_t level_index) const {
  double hit = 0.0;
  int total = 0;
  for (const CoverageStratum& s : strata) {
    if (s.count == 0) continue;
    hit += s.achieved[level_index] * s.count;
    total += s.count;
  }
  return total > 0 ? hit / total : std::numeric_limits<double>::quiet_NaN();
}

double CoverageReport::max_abs_deviation(std::size_t level_index) const {
  double worst = 0.0;
  for (const CoverageStratum& s : strata)
    if (s.count > 0)
      worst = std::max(worst,
                       std::fabs(s.achieved[level_index] - levels[level_index]));
  return worst;
}

double CoverageReport::mean_abs_deviation(std::size_t level_index) const {
  double sum = 0.0;
  int n = 0;
  for (const CoverageStratum& s : strata) {
    if (s.count == 0) continue;
    sum += std::fabs(s.achieved[level_index] - levels[level_index]);
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

CoverageFlags evaluate_coverage(const LocalConformalPredictor& predictor,
                                const Dataset& test,
                                const std::vector<double>& levels) {
  for (double lv : levels)
    if (!(lv > 0.0 && lv < 1.0))
      throw ConfigError("coverage levels must be in (0,1)");
  CoverageFlags flags;
  flags.levels = levels;
  flags.assigned_group.resize(test.n());
  flags.covered.assign(static_cast<std::size_t>(test.n()) * levels.size(), 0);
  for (int i = 0; i < test.n(); ++i) {
    const ScoredQuery q = predictor.prepare(test.feature_row(i));
    flags.assigned_group[i] = q.group;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const PredictionRegion r = predictor.region_from(q, 1.0 - levels[j]);
      flags.covered[i * levels.size() + j] =
          contains(r, test.response(i)) ? 1 : 0;
    }
  }
  return flags;
}

CoverageReport coverage_marginal(const CoverageFlags& flags) {
  std::vector<int> stratum_of(flags.assigned_group.size(), 0);
  std::vector<CoverageStratum> strata(1);
  strata[0].label = "marginal";
  return tabulate(flags, stratum_of, std::move(strata), "marginal");
}

CoverageReport coverage_by_bins(const CoverageFlags& flags, const Dataset& test,
                                int bin_count) {
  if (test.dim() != 1)
    throw UsageError("coverage_by_bins needs a 1-dimensional feature space");
  if (bin_count < 2) throw ConfigError("coverage_by_bins: need at least 2 bins");
  const double lo = test.features().col(0).minCoeff();
  const double hi = test.features().col(0).maxCoeff();
  const double width = (hi - lo) / bin_count;

  std::vector<CoverageStratum> strata(bin_count);
  for (int b = 0; b < bin_count; ++b) {
    strata[b].lo = lo + b * width;
    strata[b].hi = lo + (b + 1) * width;
    strata[b].label = "bin" + std::to_string(b);
  }
  std::vector<int> stratum_of(test.n());
  for (int i = 0; i < test.n(); ++i) {
    int b = width > 0.0
                ? static_cast<int>((test.features()(i, 0) - lo) / width)
                : 0;
    stratum_of[i] = std::min(b, bin_count - 1);  // max point joins the last bin
  }
  return tabulate(flags, stratum_of, std::move(strata), "x-bin");
}

CoverageReport coverage_by_groups(const CoverageFlags& flags, const Dataset& test) {
  if (!test.has_group_labels())
    throw UsageError("coverage_by_groups: dataset has no group labels");
  const int g = test.group_count();
  std::vector<CoverageStratum> strata(g);
  for (int i = 0; i < g; ++i) strata[i].label = "group" + std::to_string(i);
  return tabulate(flags, test.group_labels(), std::move(strata), "true-group");
}

CoverageReport coverage_by_clusters(const CoverageFlags& flags, int group_count) {
  std::vector<CoverageStratum> strata(group_count);
  for (int i = 0; i < group_count; ++i)
    strata[i].label = "cluster" + std::to_string(i);
  return tabulate(flags, flags.assigned_group, std::move(strata),
                  "assigned-cluster");
}

CoverageReport coverage_by_bins(const LocalConformalPredictor& predictor,
                                const Dataset& test, int bin_count,
                                const std::vector<double>& levels) {
  return coverage_by_bins(evaluate_coverage(predictor, test, levels), test,
                          bin_count);
}

CoverageReport coverage_by_groups(const LocalConformalPredictor& predictor,
                                  const Dataset& test,
                                  const std::vector<double>& levels) {
  return coverage_by_groups(evaluate_coverage(predictor, test, levels), test);
}

ComparisonTable compare(
    const std::vector<std::pair<std::string, const LocalConformalPredictor*>>& methods,
    const Dataset& test, const std::string& stratification, int bin_count,
    const std::vector<double>& levels) {
  ComparisonTable table;
  table.levels = levels;
  for (const auto& [name, predictor] : methods) {
    const CoverageFlags flags = evaluate_coverage(*predictor, test, levels);
    MethodComparison mc;
    mc.name = name;
    if (stratification == "x-bin") {
      mc.report = coverage_by_bins(flags, test, bin_count);
    } else if (stratification == "true-group") {
      mc.report = coverage_by_groups(flags, test);
    } else if (stratification == "assigned-cluster") {
      mc.report = coverage_by_clusters(flags, predictor->partition().group_count());
    } else if (stratification == "marginal") {
      mc.report = coverage_marginal(flags);
    } else {
      throw ConfigError("unknown stratification '" + stratification + "'");
    }
    for (std::size_t j = 0; j < levels.size(); ++j) {
      mc.mean_abs_deviation.push_back(mc.report.mean_abs_deviation(j));
      mc.max_abs_deviation.push_back(mc.report.max_abs_deviation(j));
    }
    table.methods.push_back(std::move(mc));
  }
  return table;
}

namespace {

const char* kPalette[8] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

// signed deviation to a blue-white-red fill, clamped at +-0.15
std::string deviation_color(double dev) {
  if (std::isnan(dev)) return "#cccccc";
  const double t = std::max(-1.0, std::min(1.0, dev / 0.15));
  int r = 255, g = 255, b = 255;
  if (t >= 0) {
    g = static_cast<int>(255 * (1.0 - t));
    b = g;
  } else {
    r = static_cast<int>(255 * (1.0 + t));
    g = r;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

void render_curves_svg(const CoverageReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const int w = 640, h = 480, ml = 60, mb = 50, mt = 20, mr = 160;
  const double pw = w - ml - mr, ph = h - mt - mb;
  auto sx = [&](double lv) { return ml + lv * pw; };
  auto sy = [&](double cov) { return mt + (1.0 - cov) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  // axes + diagonal reference
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt("%.2f", sx(0)) << "\" y1=\"" << fmt("%.2f", sy(0))
      << "\" x2=\"" << fmt("%.2f", sx(1)) << "\" y2=\"" << fmt("%.2f", sy(1))
      << "\" stroke=\"#999999\" stroke-dasharray=\"4,3\"/>\n";
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">nominal level</text>\n";
  out << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">achieved coverage</text>\n";

  int color = 0;
  int legend_y = mt + 10;
  for (const CoverageStratum& s : report.strata) {
    if (s.count == 0) continue;
    const char* stroke = kPalette[color % 8];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" points=\"";
    for (std::size_t j = 0; j < report.levels.size(); ++j) {
      if (std::isnan(s.achieved[j])) continue;
      out << fmt("%.2f", sx(report.levels[j])) << ","
          << fmt("%.2f", sy(s.achieved[j])) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << ml + pw + 10 << "\" y=\"" << legend_y
        << "\" font-size=\"11\" fill=\"" << stroke << "\">" << s.label << " (n="
        << s.count << ")</text>\n";
    legend_y += 14;
    ++color;
  }
  out << "</svg>\n";
}

void render_heatmap_svg(const CoverageReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const int cell_w = 70, cell_h = 22, ml = 110, mt = 40;
  const int w = ml + cell_w * std::max<std::size_t>(report.levels.size(), 1) + 20;
  const int h = mt + cell_h * std::max<std::size_t>(report.strata.size(), 1) + 20;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"16\" font-size=\"12\">achieved - nominal ("
      << report.stratification << ")</text>\n";
  for (std::size_t j = 0; j < report.levels.size(); ++j)
    out << "<text x=\"" << ml + static_cast<int>(j) * cell_w + cell_w / 2
        << "\" y=\"" << mt - 6 << "\" font-size=\"11\" text-anchor=\"middle\">"
        << fmt("%.2f", report.levels[j]) << "</text>\n";
  for (std::size_t s = 0; s < report.strata.size(); ++s) {
    const CoverageStratum& st = report.strata[s];
    out << "<text x=\"" << ml - 6 << "\" y=\""
        << mt + static_cast<int>(s) * cell_h + cell_h - 7
        << "\" font-size=\"11\" text-anchor=\"end\">" << st.label << "</text>\n";
    for (std::size_t j = 0; j < report.levels.size(); ++j) {
      const double dev = st.count > 0
                             ? st.achieved[j] - report.levels[j]
                             : std::numeric_limits<double>::quiet_NaN();
      out << "<rect x=\"" << ml + static_cast<int>(j) * cell_w << "\" y=\""
          << mt + static_cast<int>(s) * cell_h << "\" width=\"" << cell_w
          << "\" height=\"" << cell_h << "\" fill=\"" << deviation_color(dev)
          << "\" stroke=\"#888888\"/>\n";
      if (st.count > 0)
        out << "<text x=\"" << ml + static_cast<int>(j) * cell_w + cell_w / 2
            << "\" y=\"" << mt + static_cast<int>(s) * cell_h + cell_h - 7
            << "\" font-size=\"10\" text-anchor=\"middle\">"
            << fmt("%+.3f", dev) << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace

void render_report(const CoverageReport& report, const std::string& base_path) {
  {
    std::ofstream out(base_path + ".csv", std::ios::binary);
    if (!out) throw IoError("cannot write " + base_path + ".csv");
    out << "stratification,stratum,lo,hi,count,level,achieved,deviation,band\n";
    for (const CoverageStratum& s : report.strata) {
      for (std::size_t j = 0; j < report.levels.size(); ++j) {
        out << report.stratification << "," << s.label << ",";
        if (!std::isnan(s.lo)) out << fmt("%.17g", s.lo);
        out << ",";
        if (!std::isnan(s.hi)) out << fmt("%.17g", s.hi);
        out << "," << s.count << "," << fmt("%.17g", report.levels[j]) << ",";
        if (s.count > 0) {
          out << fmt("%.17g", s.achieved[j]) << ","
              << fmt("%.17g", s.achieved[j] - report.levels[j]) << ","
              << fmt("%.17g", binomial_band(report.levels[j], s.count));
        } else {
          out << ",,";
        }
        out << "\n";
      }
    }
  }
  render_curves_svg(report, base_path + "_curves.svg");
  render_heatmap_svg(report, base_path + "_heatmap.svg");
}

void write_comparison(const ComparisonTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "method,level,mean_abs_deviation,max_abs_deviation\n";
  for (const MethodComparison& mc : table.methods)
    for (std::size_t j = 0; j < table.levels.size(); ++j)
      out << mc.name << "," << fmt("%.17g", table.levels[j]) << ","
          << fmt("%.17g", mc.mean_abs_deviation[j]) << ","
          << fmt("%.17g", mc.max_abs_deviation[j]) << "\n";
}

}  // namespace mdsplit
