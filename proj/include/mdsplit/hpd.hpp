#ifndef MDSPLIT_HPD_HPP_
#define MDSPLIT_HPD_HPP_

#include <memory>
#include <vector>

#include "mdsplit/cde.hpp"
#include "mdsplit/dataset.hpp"

namespace mdsplit {

// Density values tabulated on the response grid, with superlevel-set mass
// integration. Trapezoid cells are split at the level crossing so the mass
// is exact for the piecewise-linear interpolant; node ties (f == level)
// keep their full trapezoid contribution.
struct DensityGrid {
  GridSpec grid;
  std::vector<double> values;
  double total_mass = 0.0;

  static DensityGrid evaluate(const GaussianMixture1D& mixture,
                              const GridSpec& grid);

  // Mass of {y : f(y) >= level}, clamped to [0, 1].
  double mass_above(double level) const;

  // mass_above at every node's own density value, via one descending
  // sweep over levels.
  std::vector<double> mass_above_all_nodes() const;
};

// Highest-predictive-density value of y at x: the probability mass of the
// region where the conditional density is at least as high as at y.
// 0 at the conditional mode, 1 deep in the tails.
class HpdEvaluator {
 public:
  enum class Method { analytic_gaussian, grid };

  HpdEvaluator(std::shared_ptr<const CdeModel> model, Method method);

  double hpd(const Eigen::VectorXd& x, double y) const;

  // HPD of every response-grid node at x (one density pass).
  std::vector<double> hpd_curve(const Eigen::VectorXd& x) const;

  std::vector<double> hpd_batch(const Dataset& data,
                                const std::vector<int>& indices) const;

  const CdeModel& model() const { return *model_; }
  Method method() const { return method_; }

 private:
  DensityGrid checked_grid(const GaussianMixture1D& mixture,
                           const Eigen::VectorXd& x) const;

  std::shared_ptr<const CdeModel> model_;
  Method method_;
};

double hpd(const HpdEvaluator& evaluator, const Eigen::VectorXd& x, double y);
std::vector<double> hpd_batch(const HpdEvaluator& evaluator, const Dataset& data,
                              const std::vector<int>& indices);

}  // namespace mdsplit

#endif  // MDSPLIT_HPD_HPP_
