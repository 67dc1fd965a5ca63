#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cmosb/matrix.hpp"

namespace cmosb::gbdt {

inline constexpr int kDefaultBins = 32;

// Per-feature ascending cut values. A value v falls into bin
// b = #{cuts < v}, so bin b covers (cuts[b-1], cuts[b]].
class BinEdges {
 public:
  BinEdges() = default;
  explicit BinEdges(std::vector<std::vector<double>> cuts) : cuts_(std::move(cuts)) {}

  std::size_t feature_count() const { return cuts_.size(); }
  int bin_count(std::size_t feature) const { return static_cast<int>(cuts_[feature].size()) + 1; }
  int bin_of(std::size_t feature, double value) const;
  // Upper edge of `bin`; routing sends v <= cut_value(f, b) to the left child.
  double cut_value(std::size_t feature, int bin) const { return cuts_[feature][bin]; }
  const std::vector<double>& cuts(std::size_t feature) const { return cuts_[feature]; }

  friend bool operator==(const BinEdges&, const BinEdges&) = default;

 private:
  std::vector<std::vector<double>> cuts_;
};

// Edges at empirical quantiles of the selected rows; coincident quantiles collapse.
BinEdges quantile_binning(const Matrix& features, std::span<const std::size_t> rows,
                          int max_bins = kDefaultBins);
BinEdges quantile_binning(const Matrix& features, int max_bins = kDefaultBins);

// Bin index of every cell of a feature matrix under fixed edges.
class BinnedMatrix {
 public:
  BinnedMatrix() = default;
  BinnedMatrix(const Matrix& features, const BinEdges& edges);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint16_t operator()(std::size_t r, std::size_t c) const { return bins_[r * cols_ + c]; }
  const BinEdges& edges() const { return edges_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint16_t> bins_;
  BinEdges edges_;
};

}  // namespace cmosb::gbdt
