#include "cmosb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cmosb/error.hpp"

namespace cmosb::objectives {

bool ObjectiveVector::finite() const {
  return std::isfinite(utility_loss) && std::isfinite(training_cost) &&
         std::isfinite(privacy_leakage);
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw MetricError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks of positives, ties sharing their average rank.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += midrank;
        ++positives;
      } else if (labels[order[k]] != 0) {
        throw MetricError("auc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw MetricError("auc: both classes must be present");
  const double np = static_cast<double>(positives);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

double accuracy(const Matrix& scores, std::span<const int> labels) {
  if (scores.rows() != labels.size()) throw MetricError("accuracy: scores and labels differ in length");
  if (labels.empty()) throw MetricError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = scores.row(i);
    const auto pred = std::max_element(row.begin(), row.end()) - row.begin();
    hits += pred == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double utility_loss(const gbdt::Forest& forest, const Matrix& features, std::span<const int> labels,
                    std::span<const std::size_t> rows) {
  if (rows.empty()) throw MetricError("utility_loss: empty test set");
  const Matrix scores = gbdt::predict(forest, features, rows);
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = labels[rows[i]];
  if (metric_for_classes(forest.class_count) == MetricKind::Auc) {
    return 1.0 - auc(scores.data(), y);
  }
  return 1.0 - accuracy(scores, y);
}

double training_cost(const fed::HECounters& counters, const fed::HECostModel& model) {
  return static_cast<double>(counters.enc) * model.t_enc +
         static_cast<double>(counters.dec) * model.t_dec +
         static_cast<double>(counters.add) * model.t_add;
}

}  // namespace cmosb::objectives
