#include "mdsplit/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mdsplit/errors.hpp"
#include "mdsplit/rng.hpp"

namespace mdsplit {

PartitionMethod partition_method_from_string(const std::string& name) {
  if (name == "md") return PartitionMethod::md;
  if (name == "cd") return PartitionMethod::cd;
  if (name == "euclidean") return PartitionMethod::euclidean;
  if (name == "global") return PartitionMethod::global;
  throw ConfigError("unknown partition method '" + name +
                    "' (valid: md, cd, euclidean, global)");
}

std::string to_string(PartitionMethod method) {
  switch (method) {
    case PartitionMethod::md: return "md";
    case PartitionMethod::cd: return "cd";
    case PartitionMethod::euclidean: return "euclidean";
    case PartitionMethod::global: return "global";
  }
  return "?";
}

MdEmbedding::MdEmbedding(std::shared_ptr<const CoverageEstimator> estimator)
    : estimator_(std::move(estimator)) {
  if (!estimator_) throw UsageError("MdEmbedding: null estimator");
}

Eigen::VectorXd MdEmbedding::embed(const Eigen::VectorXd& x) const {
  const CoverageProfile p = estimator_->profile(x);
  return p.values / std::sqrt(static_cast<double>(p.values.size()));
}

int MdEmbedding::dim() const { return estimator_->alpha_grid().size(); }

CdEmbedding::CdEmbedding(std::shared_ptr<const CdeModel> model)
    : evaluator_(std::move(model), HpdEvaluator::Method::grid) {}

Eigen::VectorXd CdEmbedding::embed(const Eigen::VectorXd& x) const {
  const std::vector<double> curve = evaluator_.hpd_curve(x);
  const double scale = std::sqrt(evaluator_.model().grid().step());
  Eigen::VectorXd out(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = curve[i] * scale;
  return out;
}

int CdEmbedding::dim() const { return evaluator_.model().grid().points; }

EuclideanEmbedding::EuclideanEmbedding(Standardizer standardizer)
    : standardizer_(std::move(standardizer)) {}

Eigen::VectorXd EuclideanEmbedding::embed(const Eigen::VectorXd& x) const {
  return standardizer_.apply(x);
}

int EuclideanEmbedding::dim() const { return standardizer_.dim(); }

namespace {

int nearest_centroid(const Eigen::MatrixXd& centroids,
                     const Eigen::VectorXd& point) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c).transpose() - point).squaredNorm();
    if (d < best_d) {  // strict: ties keep the smallest index
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

KmeansResult lloyd_run(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  const int p = static_cast<int>(points.cols());

  // D^2 seeding
  Eigen::MatrixXd centroids(k, p);
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  centroids.row(0) = points.row(static_cast<int>(rng.below(n)));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (points.row(i) - centroids.row(c - 1)).squaredNorm();
      min_d2[i] = std::min(min_d2[i], d);
      total += min_d2[i];
    }
    int pick = -1;
    if (total > 0.0) {
      double u;
      do {
        u = rng.uniform01();
      } while (u == 0.0);  // a strictly positive target never lands on a
                           // zero-weight (already chosen) point
      const double target = u * total;
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        cum += min_d2[i];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
    }
    if (pick < 0) {
      // numerically exhausted distances; fall back to the first point not
      // yet used as a centroid (distinct-point precondition guarantees one)
      for (int i = 0; i < n && pick < 0; ++i)
        if (min_d2[i] > 0.0) pick = i;
      if (pick < 0) pick = 0;
    }
    centroids.row(c) = points.row(pick);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int c = nearest_centroid(centroids, points.row(i));
      if (c != assign[i]) {
        assign[i] = c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, p);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assign[i]) += points.row(i);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
      } else {
        // deterministic repair: move to the point farthest from its centroid
        int far_i = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = (points.row(i) - centroids.row(assign[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        centroids.row(c) = points.row(far_i);
      }
    }
  }

  KmeansResult result;
  result.centroids = centroids;
  result.assignments = assign;
  result.within_ss = 0.0;
  for (int i = 0; i < n; ++i)
    result.within_ss += (points.row(i) - centroids.row(assign[i])).squaredNorm();
  return result;
}

}  // namespace

KmeansResult kmeanspp(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                      int restarts) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw ConfigError("kmeanspp: K must be >= 1");
  if (restarts < 1) throw ConfigError("kmeanspp: restarts must be >= 1");

  std::set<std::vector<double>> distinct;
  for (int i = 0; i < n && static_cast<int>(distinct.size()) < k; ++i)
    distinct.emplace(points.row(i).data(), points.row(i).data() + points.cols());
  if (static_cast<int>(distinct.size()) < k)
    throw ConfigError("kmeanspp: fewer distinct points than K");

  KmeansResult best;
  best.within_ss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, "kmeanspp", static_cast<std::uint64_t>(r)));
    KmeansResult run = lloyd_run(points, k, rng);
    if (run.within_ss < best.within_ss) best = std::move(run);
  }
  return best;
}

PartitionModel::PartitionModel(PartitionMethod method) : method_(method) {
  if (method != PartitionMethod::global)
    throw UsageError("only the global partition can omit centroids");
  centroids_.resize(1, 0);
}

PartitionModel::PartitionModel(PartitionMethod method, Eigen::MatrixXd centroids,
                               std::shared_ptr<const Embedding> embedding)
    : method_(method),
      centroids_(std::move(centroids)),
      embedding_(std::move(embedding)) {
  if (method_ == PartitionMethod::global) {
    centroids_.resize(1, 0);
    embedding_.reset();
    return;
  }
  if (!embedding_) throw UsageError("PartitionModel: missing embedding");
  if (centroids_.rows() < 1) throw UsageError("PartitionModel: no centroids");
  if (centroids_.cols() != embedding_->dim())
    throw UsageError("PartitionModel: centroid/embedding dimension mismatch");
}

int PartitionModel::group_count() const {
  return static_cast<int>(std::max<Eigen::Index>(centroids_.rows(), 1));
}

int PartitionModel::assign(const Eigen::VectorXd& x) const {
  if (method_ == PartitionMethod::global) return 0;
  return assign_embedded(embedding_->embed(x));
}

int PartitionModel::assign_embedded(const Eigen::VectorXd& point) const {
  if (method_ == PartitionMethod::global) return 0;
  return nearest_centroid(centroids_, point);
}

PartitionModel fit_partition(PartitionMethod method,
                             std::shared_ptr<const Embedding> embedding,
                             const Eigen::MatrixXd& calibration_features,
                             int k, std::uint64_t seed, int restarts) {
  if (method == PartitionMethod::global) return PartitionModel(method);
  if (!embedding) throw UsageError("fit_partition: missing embedding");
  const int n = static_cast<int>(calibration_features.rows());
  Eigen::MatrixXd embedded(n, embedding->dim());
  for (int i = 0; i < n; ++i)
    embedded.row(i) = embedding->embed(calibration_features.row(i));
  const KmeansResult km = kmeanspp(embedded, k, seed, restarts);
  return PartitionModel(method, km.centroids, std::move(embedding));
}

int assign(const PartitionModel& model, const Eigen::VectorXd& x) {
  return model.assign(x);
}

}  // namespace mdsplit
