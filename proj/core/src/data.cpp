#include "cmosb/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "cmosb/error.hpp"
#include "cmosb/random.hpp"

namespace cmosb::data {
namespace {

// Partial-pivot elimination; returns false when the matrix is numerically singular.
bool full_rank(Matrix a) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < 1e-8 * scale) return false;
    if (pivot != col)
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  return true;
}

bool has_constant_column(const Matrix& m) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    bool constant = true;
    for (std::size_t r = 1; r < m.rows() && constant; ++r) constant = m(r, c) == m(0, c);
    if (constant) return true;
  }
  return false;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

Dataset generate_synthetic(std::size_t n, std::size_t f_active, std::size_t f_passive, int classes,
                           double class_sep, std::uint64_t seed) {
  if (classes < 2) throw ParameterError("generate_synthetic: class count must be >= 2");
  if (f_active < 1 || f_passive < 1)
    throw ParameterError("generate_synthetic: each party needs at least one feature");
  if (n < static_cast<std::size_t>(classes) * 2)
    throw ParameterError("generate_synthetic: need at least two instances per class");
  if (!(class_sep > 0.0)) throw ParameterError("generate_synthetic: class_sep must be positive");
  const std::size_t f = f_active + f_passive;
  // Centroids live on the smallest hypercube (at least 2-D) with a vertex per
  // class; the other latent axes are pure noise until the mixing step.
  std::size_t informative = 2;
  while ((std::size_t{1} << informative) < static_cast<std::size_t>(classes)) ++informative;
  if (informative > f)
    throw ParameterError("generate_synthetic: not enough hypercube vertices for the class count");

  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, {0x5eed, attempt}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    std::set<std::vector<int>> used;
    std::vector<std::vector<int>> vertices;
    while (vertices.size() < static_cast<std::size_t>(classes)) {
      std::vector<int> v(f, 0);
      for (std::size_t k = 0; k < informative; ++k) v[k] = coin(rng) ? 1 : -1;
      if (used.insert(v).second) vertices.push_back(std::move(v));
    }

    Matrix mixing(f, f);
    do {
      for (auto& v : mixing.data()) v = normal(rng);
    } while (!full_rank(mixing));

    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % classes);
    std::shuffle(labels.begin(), labels.end(), rng);

    Matrix features(n, f);
    std::vector<double> point(f);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& vertex = vertices[labels[i]];
      for (std::size_t k = 0; k < f; ++k) point[k] = class_sep * vertex[k] + normal(rng);
      for (std::size_t r = 0; r < f; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f; ++k) acc += mixing(r, k) * point[k];
        features(i, r) = acc;
      }
    }
    if (has_constant_column(features)) continue;

    Dataset ds;
    ds.features = std::move(features);
    ds.labels = std::move(labels);
    ds.class_count = classes;
    ds.seed = seed;
    for (std::size_t k = 0; k < f; ++k) ds.column_names.push_back("x" + std::to_string(k));
    return ds;
  }
}

Dataset read_csv(std::istream& in, const LabelColumn& label_column, int expected_classes) {
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("csv: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);

  std::size_t label_idx = 0;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw IngestionError("csv: label column '" + *name + "' not found");
    label_idx = static_cast<std::size_t>(it - header.begin());
  } else {
    label_idx = std::get<std::size_t>(label_column);
    if (label_idx >= header.size())
      throw IngestionError("csv: label column index " + std::to_string(label_idx) +
                           " out of range (" + std::to_string(header.size()) + " columns)");
  }
  if (header.size() < 2) throw IngestionError("csv: need at least one feature column");

  std::vector<double> values;
  std::vector<double> raw_labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw IngestionError("csv: row " + std::to_string(row) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(header.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      double v = 0.0;
      const auto* first = cell.data();
      const auto* last = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        throw IngestionError("csv: row " + std::to_string(row) + ", column '" + header[c] +
                             "': non-numeric or missing value '" + cell + "'");
      if (c == label_idx)
        raw_labels.push_back(v);
      else
        values.push_back(v);
    }
  }
  if (raw_labels.empty()) throw IngestionError("csv: no data rows");

  std::map<double, int> codes;
  for (double v : raw_labels) codes.emplace(v, 0);
  int next = 0;
  for (auto& [_, code] : codes) code = next++;
  if (expected_classes > 0 && next != expected_classes)
    throw IngestionError("csv: label column '" + header[label_idx] + "' has " +
                         std::to_string(next) + " classes, expected " +
                         std::to_string(expected_classes));
  if (next < 2) throw IngestionError("csv: label column has fewer than two classes");

  Dataset ds;
  const std::size_t cols = header.size() - 1;
  ds.features = Matrix(raw_labels.size(), cols);
  std::copy(values.begin(), values.end(), ds.features.data().begin());
  ds.labels.reserve(raw_labels.size());
  for (double v : raw_labels) ds.labels.push_back(codes.at(v));
  ds.class_count = next;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_idx) ds.column_names.push_back(header[c]);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                 int expected_classes) {
  std::ifstream in(path);
  if (!in) throw IngestionError("csv: cannot open " + path.string());
  return read_csv(in, label_column, expected_classes);
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  for (std::size_t c = 0; c < dataset.cols(); ++c) {
    out << (c < dataset.column_names.size() ? dataset.column_names[c] : "x" + std::to_string(c))
        << ',';
  }
  out << "label\n";
  char buf[64];
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    for (std::size_t c = 0; c < dataset.cols(); ++c) {
      auto res = std::to_chars(buf, buf + sizeof buf, dataset.features(r, c));
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << dataset.labels[r] << '\n';
  }
}

VerticalPartition vertical_partition(std::size_t total_columns, std::size_t active_count,
                                     std::uint64_t seed, bool shuffled) {
  if (active_count < 1 || active_count >= total_columns)
    throw ParameterError("vertical_partition: active_count must be in [1, " +
                         std::to_string(total_columns) + ")");
  std::vector<std::size_t> order(total_columns);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffled) {
    Rng rng(derive_seed(seed, {0xc01}));
    std::shuffle(order.begin(), order.end(), rng);
  }
  VerticalPartition p;
  p.active_columns.assign(order.begin(), order.begin() + static_cast<long>(active_count));
  p.passive_columns.assign(order.begin() + static_cast<long>(active_count), order.end());
  std::sort(p.active_columns.begin(), p.active_columns.end());
  std::sort(p.passive_columns.begin(), p.passive_columns.end());
  return p;
}

VerticalPartition vertical_partition(const Dataset& dataset, std::size_t active_count,
                                     std::uint64_t seed, bool shuffled) {
  return vertical_partition(dataset.cols(), active_count, seed, shuffled);
}

SplitIndices train_test_split(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ParameterError("train_test_split: empty dataset");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, {0x5917}));
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t train = (2 * n) / 3;
  SplitIndices s;
  s.train_rows.assign(order.begin(), order.begin() + static_cast<long>(train));
  s.test_rows.assign(order.begin() + static_cast<long>(train), order.end());
  s.seed = seed;
  return s;
}

std::vector<std::size_t> sample_balanced(std::span<const int> labels, std::size_t per_class,
                                         std::uint64_t seed) {
  int classes = 0;
  for (int y : labels) {
    if (y < 0) throw ParameterError("sample_balanced: negative label");
    classes = std::max(classes, y + 1);
  }
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(derive_seed(seed, {0xba1}));
  std::vector<std::size_t> out;
  out.reserve(per_class * by_class.size());
  for (int k = 0; k < classes; ++k) {
    auto& pool = by_class[k];
    if (pool.size() < per_class)
      throw SamplingError("sample_balanced: class " + std::to_string(k) + " has " +
                          std::to_string(pool.size()) + " instances, need " +
                          std::to_string(per_class));
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < per_class; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      out.push_back(pool[i]);
    }
  }
  return out;
}

}  // namespace cmosb::data
