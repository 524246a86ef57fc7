#include "mdsplit/hpd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mdsplit/errors.hpp"

namespace mdsplit {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Mass of the piecewise-linear density above `level` inside one cell.
double cell_mass_above(double f0, double f1, double level, double h) {
  const double lo = std::min(f0, f1);
  const double hi = std::max(f0, f1);
  if (level <= lo) return 0.5 * (f0 + f1) * h;
  if (level >= hi) return 0.0;
  const double t = (hi - level) / (hi - lo);  // included fraction, at the hi end
  return 0.5 * (hi + level) * t * h;
}

}  // namespace

DensityGrid DensityGrid::evaluate(const GaussianMixture1D& mixture,
                                  const GridSpec& grid) {
  DensityGrid out;
  out.grid = grid;
  out.values.resize(grid.points);
  for (int i = 0; i < grid.points; ++i) out.values[i] = mixture.pdf(grid.node(i));
  double mass = 0.0;
  for (int i = 0; i + 1 < grid.points; ++i)
    mass += 0.5 * (out.values[i] + out.values[i + 1]);
  out.total_mass = mass * grid.step();
  return out;
}

double DensityGrid::mass_above(double level) const {
  const double h = grid.step();
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    mass += cell_mass_above(values[i], values[i + 1], level, h);
  return clamp01(mass);
}

std::vector<double> DensityGrid::mass_above_all_nodes() const {
  const int g = static_cast<int>(values.size());
  const int cells = g - 1;
  const double h = grid.step();

  std::vector<int> nodes_desc(g);
  std::iota(nodes_desc.begin(), nodes_desc.end(), 0);
  std::sort(nodes_desc.begin(), nodes_desc.end(), [&](int a, int b) {
    return values[a] != values[b] ? values[a] > values[b] : a < b;
  });

  std::vector<double> lo(cells), hi(cells), trap(cells);
  for (int c = 0; c < cells; ++c) {
    lo[c] = std::min(values[c], values[c + 1]);
    hi[c] = std::max(values[c], values[c + 1]);
    trap[c] = 0.5 * (values[c] + values[c + 1]) * h;
  }
  std::vector<int> by_lo(cells), by_hi(cells);
  std::iota(by_lo.begin(), by_lo.end(), 0);
  by_hi = by_lo;
  std::sort(by_lo.begin(), by_lo.end(), [&](int a, int b) { return lo[a] > lo[b]; });
  std::sort(by_hi.begin(), by_hi.end(), [&](int a, int b) { return hi[a] > hi[b]; });

  std::vector<double> out(g);
  std::vector<char> full(cells, 0);
  std::vector<int> active;
  double full_mass = 0.0;
  int next_full = 0, next_active = 0;
  for (int node : nodes_desc) {
    const double level = values[node];
    while (next_active < cells && hi[by_hi[next_active]] > level)
      active.push_back(by_hi[next_active++]);
    while (next_full < cells && lo[by_lo[next_full]] >= level) {
      full_mass += trap[by_lo[next_full]];
      full[by_lo[next_full]] = 1;
      ++next_full;
    }
    double partial = 0.0;
    std::size_t kept = 0;
    for (int c : active) {
      if (full[c]) continue;  // promoted; drop from the straddler list
      active[kept++] = c;
      const double t = (hi[c] - level) / (hi[c] - lo[c]);
      partial += 0.5 * (hi[c] + level) * t * h;
    }
    active.resize(kept);
    out[node] = clamp01(full_mass + partial);
  }
  return out;
}

HpdEvaluator::HpdEvaluator(std::shared_ptr<const CdeModel> model, Method method)
    : model_(std::move(model)), method_(method) {
  if (!model_) throw UsageError("HpdEvaluator: null model");
  if (method_ == Method::analytic_gaussian) {
    const bool single_gaussian =
        model_->variant() == CdeModel::Variant::gaussian_linear ||
        (model_->variant() == CdeModel::Variant::knn_mixture &&
         model_->knn_mixture().component_count == 1);
    if (!single_gaussian)
      throw UsageError("analytic_gaussian HPD requires a single-Gaussian model");
  }
}

DensityGrid HpdEvaluator::checked_grid(const GaussianMixture1D& mixture,
                                       const Eigen::VectorXd& x) const {
  DensityGrid dg = DensityGrid::evaluate(mixture, model_->grid());
  if (dg.total_mass < 0.98 || dg.total_mass > 1.02) {
    std::ostringstream msg;
    msg << "response grid captures mass " << dg.total_mass << " at x = (";
    for (Eigen::Index j = 0; j < x.size(); ++j)
      msg << (j ? ", " : "") << x(j);
    msg << "); widen or refine the grid";
    throw IntegrationError(msg.str());
  }
  return dg;
}

double HpdEvaluator::hpd(const Eigen::VectorXd& x, double y) const {
  if (!std::isfinite(y)) throw UsageError("hpd: y must be finite");
  const GaussianMixture1D mixture = model_->conditional(x);
  if (method_ == Method::analytic_gaussian) {
    const double z = std::fabs(y - mixture.means[0]) / mixture.sds[0];
    return 2.0 * normal_cdf(z) - 1.0;
  }
  const DensityGrid dg = checked_grid(mixture, x);
  return dg.mass_above(mixture.pdf(y));
}

std::vector<double> HpdEvaluator::hpd_curve(const Eigen::VectorXd& x) const {
  const GaussianMixture1D mixture = model_->conditional(x);
  if (method_ == Method::analytic_gaussian) {
    std::vector<double> out(model_->grid().points);
    for (int i = 0; i < model_->grid().points; ++i) {
      const double z =
          std::fabs(model_->grid().node(i) - mixture.means[0]) / mixture.sds[0];
      out[i] = 2.0 * normal_cdf(z) - 1.0;
    }
    return out;
  }
  return checked_grid(mixture, x).mass_above_all_nodes();
}

std::vector<double> HpdEvaluator::hpd_batch(const Dataset& data,
                                            const std::vector<int>& indices) const {
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const int i = indices[k];
    if (i < 0 || i >= data.n()) throw UsageError("hpd_batch: index out of range");
    try {
      out.push_back(hpd(data.feature_row(i), data.response(i)));
    } catch (const IntegrationError& e) {
      throw IntegrationError("dataset index " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

double hpd(const HpdEvaluator& evaluator, const Eigen::VectorXd& x, double y) {
  return evaluator.hpd(x, y);
}

std::vector<double> hpd_batch(const HpdEvaluator& evaluator, const Dataset& data,
                              const std::vector<int>& indices) {
  return evaluator.hpd_batch(data, indices);
}

}  // namespace mdsplit
