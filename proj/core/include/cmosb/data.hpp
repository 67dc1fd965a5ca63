#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cmosb/matrix.hpp"

namespace cmosb::data {

// Feature matrix plus labels held by the active party.
struct Dataset {
  Matrix features;
  std::vector<int> labels;  // each in [0, class_count)
  int class_count = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> column_names;

  std::size_t rows() const { return features.rows(); }
  std::size_t cols() const { return features.cols(); }
};

struct VerticalPartition {
  std::vector<std::size_t> active_columns;
  std::vector<std::size_t> passive_columns;

  std::size_t total() const { return active_columns.size() + passive_columns.size(); }
};

struct SplitIndices {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultClassSep = 1.0;

// Class centroids sit on distinct vertices of the smallest hypercube (at least
// 2-D, like sklearn's make_classification) at +-class_sep; the remaining latent
// axes carry noise only. Each instance is centroid + N(0, I), and the whole
// cloud is pushed through one
// random full-rank linear map. Labels are balanced to within one instance.
Dataset generate_synthetic(std::size_t n, std::size_t f_active, std::size_t f_passive,
                           int classes, double class_sep, std::uint64_t seed);

// Label column by header name or 0-based index.
using LabelColumn = std::variant<std::string, std::size_t>;

// Reads a numeric CSV with a single header row. Labels are re-encoded to
// [0, C) by ascending original value. expected_classes == 0 skips the check.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                 int expected_classes);
Dataset read_csv(std::istream& in, const LabelColumn& label_column, int expected_classes);

// Writes features followed by a trailing "label" column.
void write_csv(const Dataset& dataset, std::ostream& out);

VerticalPartition vertical_partition(const Dataset& dataset, std::size_t active_count,
                                     std::uint64_t seed, bool shuffled = false);
VerticalPartition vertical_partition(std::size_t total_columns, std::size_t active_count,
                                     std::uint64_t seed, bool shuffled = false);

// Uniform shuffle by seed; |train| = floor(2n/3).
SplitIndices train_test_split(std::size_t n, std::uint64_t seed);
inline SplitIndices train_test_split(const Dataset& dataset, std::uint64_t seed) {
  return train_test_split(dataset.rows(), seed);
}

// Exactly per_class positions (into `labels`) for every class, sorted by
// class then by draw order.
std::vector<std::size_t> sample_balanced(std::span<const int> labels, std::size_t per_class,
                                         std::uint64_t seed);

}  // namespace cmosb::data
