#include "mdsplit/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdsplit/errors.hpp"
#include "mdsplit/rng.hpp"

namespace mdsplit {

Dataset::Dataset(Eigen::MatrixXd features, Eigen::VectorXd responses,
                 std::optional<std::vector<int>> group_labels)
    : features_(std::move(features)),
      responses_(std::move(responses)),
      group_labels_(std::move(group_labels)) {
  if (features_.rows() != responses_.size())
    throw UsageError("Dataset: feature rows != response length");
  if (features_.cols() < 1) throw UsageError("Dataset: needs at least one feature");
  if (!features_.allFinite() || !responses_.allFinite())
    throw UsageError("Dataset: non-finite entry");
  if (group_labels_) {
    if (static_cast<Eigen::Index>(group_labels_->size()) != features_.rows())
      throw UsageError("Dataset: group label length != row count");
    for (int g : *group_labels_)
      if (g < 0) throw UsageError("Dataset: negative group label");
  }
}

const std::vector<int>& Dataset::group_labels() const {
  if (!group_labels_) throw UsageError("Dataset: no group labels present");
  return *group_labels_;
}

int Dataset::group_count() const {
  int g = 0;
  for (int v : group_labels()) g = std::max(g, v + 1);
  return g;
}

Dataset Dataset::subset(const std::vector<int>& indices) const {
  Eigen::MatrixXd f(indices.size(), dim());
  Eigen::VectorXd y(indices.size());
  std::optional<std::vector<int>> labels;
  if (group_labels_) labels.emplace();
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const int i = indices[k];
    if (i < 0 || i >= n()) throw UsageError("Dataset::subset: index out of range");
    f.row(k) = features_.row(i);
    y(k) = responses_(i);
    if (labels) labels->push_back((*group_labels_)[i]);
  }
  return Dataset(std::move(f), std::move(y), std::move(labels));
}

SplitIndices split(const Dataset& dataset, const SplitFractions& fractions,
                   std::uint64_t seed) {
  const double fs[4] = {fractions.train, fractions.validation,
                        fractions.diagnostic, fractions.calibration};
  double total = 0.0;
  for (double f : fs) {
    if (f < 0.0 || f > 1.0) throw ConfigError("split: fraction outside [0,1]");
    total += f;
  }
  if (total > 1.0 + 1e-12) throw ConfigError("split: fractions sum above 1");
  const int n = dataset.n();
  if (n < 8) throw ConfigError("split: need at least 8 rows");

  Rng rng(seed);
  const std::vector<int> perm = rng.permutation(n);

  SplitIndices out;
  std::vector<int>* sets[4] = {&out.train, &out.validation, &out.diagnostic,
                               &out.calibration};
  std::size_t cursor = 0;
  for (int s = 0; s < 4; ++s) {
    const auto size = static_cast<std::size_t>(
        std::floor(fs[s] * static_cast<double>(n)));
    sets[s]->assign(perm.begin() + cursor, perm.begin() + cursor + size);
    cursor += size;
  }
  return out;
}

namespace {

double parse_cell(const std::string& cell, long line) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError("non-numeric cell '" + cell + "'", line);
  return value;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_row(line);

  int d = 0;
  bool has_group = false;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& name = header[j];
    if (name == "x" + std::to_string(j + 1)) {
      d = static_cast<int>(j + 1);
    } else if (name == "y" && static_cast<int>(j) == d) {
      // response column right after the features
    } else if (name == "group" && j == header.size() - 1 &&
               static_cast<int>(j) == d + 1) {
      has_group = true;
    } else {
      throw ParseError("unexpected column '" + name + "'", 1);
    }
  }
  if (d == 0 || header.size() != static_cast<std::size_t>(d) + (has_group ? 2 : 1))
    throw ParseError("header must be x1..xd,y[,group]", 1);

  std::vector<double> features;
  std::vector<double> responses;
  std::vector<int> groups;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_row(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) +
                           " columns, found " + std::to_string(cells.size()),
                       line_no);
    for (int j = 0; j < d; ++j) features.push_back(parse_cell(cells[j], line_no));
    responses.push_back(parse_cell(cells[d], line_no));
    if (has_group) {
      const double g = parse_cell(cells[d + 1], line_no);
      if (g < 0 || g != std::floor(g))
        throw ParseError("group label must be a nonnegative integer", line_no);
      groups.push_back(static_cast<int>(g));
    }
  }

  const int n = static_cast<int>(responses.size());
  Eigen::MatrixXd f(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) f(i, j) = features[static_cast<std::size_t>(i) * d + j];
    y(i) = responses[i];
  }
  std::optional<std::vector<int>> labels;
  if (has_group) labels = std::move(groups);
  return Dataset(std::move(f), std::move(y), std::move(labels));
}

void write_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (int j = 0; j < dataset.dim(); ++j) out << "x" << (j + 1) << ",";
  out << "y";
  if (dataset.has_group_labels()) out << ",group";
  out << "\n";
  char buf[40];
  for (int i = 0; i < dataset.n(); ++i) {
    for (int j = 0; j < dataset.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", dataset.features()(i, j));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", dataset.response(i));
    out << buf;
    if (dataset.has_group_labels()) out << "," << dataset.group_labels()[i];
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace mdsplit
