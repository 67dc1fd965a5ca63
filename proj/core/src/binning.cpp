#include "cmosb/binning.hpp"

#include <algorithm>
#include <numeric>

#include "cmosb/error.hpp"

namespace cmosb::gbdt {

int BinEdges::bin_of(std::size_t feature, double value) const {
  const auto& c = cuts_[feature];
  return static_cast<int>(std::lower_bound(c.begin(), c.end(), value) - c.begin());
}

BinEdges quantile_binning(const Matrix& features, std::span<const std::size_t> rows,
                          int max_bins) {
  if (max_bins < 2) throw ParameterError("quantile_binning: bin count must be >= 2");
  if (max_bins > 65535) throw ParameterError("quantile_binning: bin count too large");
  std::vector<std::vector<double>> cuts(features.cols());
  std::vector<double> values(rows.size());
  const std::size_t n = rows.size();
  for (std::size_t f = 0; f < features.cols(); ++f) {
    for (std::size_t i = 0; i < n; ++i) values[i] = features(rows[i], f);
    std::sort(values.begin(), values.end());
    if (n == 0) continue;
    auto& out = cuts[f];
    for (int k = 1; k < max_bins; ++k) {
      const std::size_t pos = (static_cast<std::size_t>(k) * n) / static_cast<std::size_t>(max_bins);
      if (pos == 0 || pos >= n) continue;
      const double lo = values[pos - 1];
      const double hi = values[pos];
      const double cut = lo == hi ? lo : lo + (hi - lo) / 2.0;
      // A cut at or above the maximum would leave an empty top bin.
      if (cut >= values.back()) continue;
      if (out.empty() || cut > out.back()) out.push_back(cut);
    }
  }
  return BinEdges(std::move(cuts));
}

BinEdges quantile_binning(const Matrix& features, int max_bins) {
  std::vector<std::size_t> rows(features.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return quantile_binning(features, rows, max_bins);
}

BinnedMatrix::BinnedMatrix(const Matrix& features, const BinEdges& edges)
    : rows_(features.rows()), cols_(features.cols()), bins_(rows_ * cols_), edges_(edges) {
  if (edges.feature_count() != cols_)
    throw ParameterError("BinnedMatrix: edge schema does not match feature count");
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      bins_[r * cols_ + c] = static_cast<std::uint16_t>(edges.bin_of(c, features(r, c)));
}

}  // namespace cmosb::gbdt
