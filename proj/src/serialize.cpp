#include "mdsplit/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdsplit/errors.hpp"

namespace mdsplit {

namespace {

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw IoError("cannot open " + path);
  }

  std::istringstream expect(const std::string& keyword) {
    std::string line;
    if (!std::getline(in_, line))
      throw ParseError(path_ + ": expected '" + keyword + "'", line_no_ + 1);
    ++line_no_;
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head != keyword)
      throw ParseError(path_ + ": expected '" + keyword + "', found '" + head + "'",
                       line_no_);
    return ss;
  }

  long line() const { return line_no_; }

 private:
  std::ifstream in_;
  std::string path_;
  long line_no_ = 0;
};

void write_standardizer(std::ofstream& out, const Standardizer& z) {
  out << "standardizer " << z.dim();
  for (int j = 0; j < z.dim(); ++j) out << " " << g(z.mean(j));
  for (int j = 0; j < z.dim(); ++j) out << " " << g(z.sd(j));
  out << "\n";
}

Standardizer read_standardizer(LineReader& reader) {
  auto ss = reader.expect("standardizer");
  int d = 0;
  ss >> d;
  if (d < 1) throw ParseError("bad standardizer dimension", reader.line());
  Standardizer z;
  z.mean.resize(d);
  z.sd.resize(d);
  for (int j = 0; j < d; ++j) ss >> z.mean(j);
  for (int j = 0; j < d; ++j) ss >> z.sd(j);
  if (!ss) throw ParseError("bad standardizer payload", reader.line());
  return z;
}

GridSpec read_grid(LineReader& reader) {
  auto ss = reader.expect("grid");
  GridSpec grid;
  ss >> grid.min >> grid.max >> grid.points;
  if (!ss || grid.points < 3) throw ParseError("bad grid spec", reader.line());
  return grid;
}

}  // namespace

void save_cde(const CdeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "mdsplit-cde 1\n";
  out << "grid " << g(model.grid().min) << " " << g(model.grid().max) << " "
      << model.grid().points << "\n";
  if (model.variant() == CdeModel::Variant::gaussian_linear) {
    const GaussianLinearParams& p = model.gaussian_linear();
    out << "variant gaussian_linear\n";
    out << "intercept " << g(p.intercept) << "\n";
    out << "coefficients " << p.coefficients.size();
    for (Eigen::Index j = 0; j < p.coefficients.size(); ++j)
      out << " " << g(p.coefficients(j));
    out << "\n";
    out << "bandwidth " << g(p.bandwidth) << "\n";
    out << "variance_floor " << g(p.variance_floor) << "\n";
    out << "smoother " << p.smoother_x.rows() << " " << p.smoother_x.cols() << "\n";
    for (Eigen::Index i = 0; i < p.smoother_x.rows(); ++i) {
      out << "row";
      for (Eigen::Index j = 0; j < p.smoother_x.cols(); ++j)
        out << " " << g(p.smoother_x(i, j));
      out << " " << g(p.smoother_sq_residuals(i)) << "\n";
    }
  } else {
    const KnnMixtureParams& p = model.knn_mixture();
    out << "variant knn_mixture\n";
    out << "neighbors " << p.neighbor_count << "\n";
    out << "components " << p.component_count << "\n";
    out << "em " << p.em.max_iterations << " " << g(p.em.relative_tolerance)
        << " " << g(p.em.variance_floor) << "\n";
    write_standardizer(out, p.standardizer);
    out << "train " << p.train_features_std.rows() << " "
        << p.train_features_std.cols() << "\n";
    for (Eigen::Index i = 0; i < p.train_features_std.rows(); ++i) {
      out << "row";
      for (Eigen::Index j = 0; j < p.train_features_std.cols(); ++j)
        out << " " << g(p.train_features_std(i, j));
      out << " " << g(p.train_responses(i)) << "\n";
    }
  }
  out << "end\n";
  if (!out) throw IoError("write failed for " + path);
}

CdeModel load_cde(const std::string& path) {
  LineReader reader(path);
  {
    auto ss = reader.expect("mdsplit-cde");
    int version = 0;
    ss >> version;
    if (version != 1) throw ParseError("unsupported mdsplit-cde version", reader.line());
  }
  const GridSpec grid = read_grid(reader);
  std::string variant;
  reader.expect("variant") >> variant;
  if (variant == "gaussian_linear") {
    GaussianLinearParams p;
    reader.expect("intercept") >> p.intercept;
    {
      auto ss = reader.expect("coefficients");
      Eigen::Index d = 0;
      ss >> d;
      p.coefficients.resize(d);
      for (Eigen::Index j = 0; j < d; ++j) ss >> p.coefficients(j);
      if (!ss) throw ParseError("bad coefficients", reader.line());
    }
    reader.expect("bandwidth") >> p.bandwidth;
    reader.expect("variance_floor") >> p.variance_floor;
    Eigen::Index n = 0, d = 0;
    reader.expect("smoother") >> n >> d;
    p.smoother_x.resize(n, d);
    p.smoother_sq_residuals.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto ss = reader.expect("row");
      for (Eigen::Index j = 0; j < d; ++j) ss >> p.smoother_x(i, j);
      ss >> p.smoother_sq_residuals(i);
      if (!ss) throw ParseError("bad smoother row", reader.line());
    }
    reader.expect("end");
    return CdeModel(std::move(p), grid);
  }
  if (variant != "knn_mixture")
    throw ParseError("unknown cde variant '" + variant + "'", reader.line());
  KnnMixtureParams p;
  reader.expect("neighbors") >> p.neighbor_count;
  reader.expect("components") >> p.component_count;
  reader.expect("em") >> p.em.max_iterations >> p.em.relative_tolerance >>
      p.em.variance_floor;
  p.standardizer = read_standardizer(reader);
  Eigen::Index n = 0, d = 0;
  reader.expect("train") >> n >> d;
  p.train_features_std.resize(n, d);
  p.train_responses.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto ss = reader.expect("row");
    for (Eigen::Index j = 0; j < d; ++j) ss >> p.train_features_std(i, j);
    ss >> p.train_responses(i);
    if (!ss) throw ParseError("bad train row", reader.line());
  }
  reader.expect("end");
  return CdeModel(std::move(p), grid);
}

void save_coverage_estimator(const CoverageEstimator& estimator,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "mdsplit-coverage-estimator 1\n";
  out << "alpha_step " << g(estimator.alpha_grid().step_size) << "\n";
  out << "bandwidth " << g(estimator.bandwidth()) << "\n";
  write_standardizer(out, estimator.standardizer());
  const Eigen::MatrixXd& f = estimator.diag_features_std();
  out << "diagnostic " << f.rows() << " " << f.cols() << "\n";
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    out << "row";
    for (Eigen::Index j = 0; j < f.cols(); ++j) out << " " << g(f(i, j));
    out << " " << g(estimator.diag_hpd()[i]) << "\n";
  }
  out << "end\n";
  if (!out) throw IoError("write failed for " + path);
}

CoverageEstimator load_coverage_estimator(const std::string& path) {
  LineReader reader(path);
  {
    auto ss = reader.expect("mdsplit-coverage-estimator");
    int version = 0;
    ss >> version;
    if (version != 1)
      throw ParseError("unsupported coverage-estimator version", reader.line());
  }
  double alpha_step = 0.0, bandwidth = 0.0;
  reader.expect("alpha_step") >> alpha_step;
  reader.expect("bandwidth") >> bandwidth;
  Standardizer z = read_standardizer(reader);
  Eigen::Index n = 0, d = 0;
  reader.expect("diagnostic") >> n >> d;
  Eigen::MatrixXd features(n, d);
  std::vector<double> hpd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto ss = reader.expect("row");
    for (Eigen::Index j = 0; j < d; ++j) ss >> features(i, j);
    ss >> hpd[i];
    if (!ss) throw ParseError("bad diagnostic row", reader.line());
  }
  reader.expect("end");
  return CoverageEstimator(std::move(features), std::move(z), std::move(hpd),
                           bandwidth, AlphaGrid(alpha_step));
}

void save_partition(const PartitionModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "mdsplit-partition 1\n";
  out << "method " << to_string(model.method()) << "\n";
  out << "k " << model.group_count() << "\n";
  out << "dim " << model.centroids().cols() << "\n";
  if (model.method() == PartitionMethod::euclidean) {
    const auto* embedding =
        dynamic_cast<const EuclideanEmbedding*>(model.embedding());
    if (!embedding) throw UsageError("euclidean partition without its embedding");
    write_standardizer(out, embedding->standardizer());
  }
  for (Eigen::Index c = 0; c < model.centroids().rows(); ++c) {
    out << "centroid";
    for (Eigen::Index j = 0; j < model.centroids().cols(); ++j)
      out << " " << g(model.centroids()(c, j));
    out << "\n";
  }
  out << "end\n";
  if (!out) throw IoError("write failed for " + path);
}

PartitionModel load_partition(const std::string& path,
                              std::shared_ptr<const CoverageEstimator> md_estimator,
                              std::shared_ptr<const CdeModel> cd_model) {
  LineReader reader(path);
  {
    auto ss = reader.expect("mdsplit-partition");
    int version = 0;
    ss >> version;
    if (version != 1) throw ParseError("unsupported partition version", reader.line());
  }
  std::string method_name;
  reader.expect("method") >> method_name;
  const PartitionMethod method = partition_method_from_string(method_name);
  int k = 0;
  Eigen::Index dim = 0;
  reader.expect("k") >> k;
  reader.expect("dim") >> dim;

  std::shared_ptr<const Embedding> embedding;
  switch (method) {
    case PartitionMethod::global:
      reader.expect("end");
      return PartitionModel(method);
    case PartitionMethod::euclidean:
      embedding = std::make_shared<EuclideanEmbedding>(read_standardizer(reader));
      break;
    case PartitionMethod::md:
      if (!md_estimator)
        throw UsageError("loading an md partition needs its coverage estimator");
      embedding = std::make_shared<MdEmbedding>(std::move(md_estimator));
      break;
    case PartitionMethod::cd:
      if (!cd_model)
        throw UsageError("loading a cd partition needs its cde model");
      embedding = std::make_shared<CdEmbedding>(std::move(cd_model));
      break;
  }
  Eigen::MatrixXd centroids(k, dim);
  for (int c = 0; c < k; ++c) {
    auto ss = reader.expect("centroid");
    for (Eigen::Index j = 0; j < dim; ++j) ss >> centroids(c, j);
    if (!ss) throw ParseError("bad centroid row", reader.line());
  }
  reader.expect("end");
  return PartitionModel(method, std::move(centroids), std::move(embedding));
}

void save_predictor(const LocalConformalPredictor& predictor,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "mdsplit-predictor 1\n";
  out << "score " << to_string(predictor.score_function().kind()) << "\n";
  out << "groups " << predictor.group_scores().size() << "\n";
  for (const auto& scores : predictor.group_scores()) {
    out << "group " << scores.size();
    for (double s : scores) out << " " << g(s);
    out << "\n";
  }
  out << "end\n";
  if (!out) throw IoError("write failed for " + path);
}

LocalConformalPredictor load_predictor(const std::string& path,
                                       std::shared_ptr<const PartitionModel> partition,
                                       std::shared_ptr<const CdeModel> model) {
  LineReader reader(path);
  {
    auto ss = reader.expect("mdsplit-predictor");
    int version = 0;
    ss >> version;
    if (version != 1) throw ParseError("unsupported predictor version", reader.line());
  }
  std::string score_name;
  reader.expect("score") >> score_name;
  int groups = 0;
  reader.expect("groups") >> groups;
  std::vector<std::vector<double>> group_scores(groups);
  for (int gi = 0; gi < groups; ++gi) {
    auto ss = reader.expect("group");
    std::size_t m = 0;
    ss >> m;
    group_scores[gi].resize(m);
    for (std::size_t i = 0; i < m; ++i) ss >> group_scores[gi][i];
    if (!ss) throw ParseError("bad group scores", reader.line());
  }
  reader.expect("end");
  return LocalConformalPredictor(
      std::move(partition),
      ScoreFunction(score_kind_from_string(score_name), std::move(model)),
      std::move(group_scores));
}

}  // namespace mdsplit
