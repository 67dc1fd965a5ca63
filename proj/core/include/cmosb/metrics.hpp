#pragma once

#include <array>
#include <span>

#include "cmosb/gbdt.hpp"
#include "cmosb/he_scheme.hpp"
#include "cmosb/matrix.hpp"

namespace cmosb::objectives {

// (utility loss, training cost in seconds, privacy leakage); all minimized.
struct ObjectiveVector {
  double utility_loss = 0.0;
  double training_cost = 0.0;
  double privacy_leakage = 0.0;

  static constexpr std::size_t kSize = 3;
  static constexpr std::size_t kUtility = 0;
  static constexpr std::size_t kCost = 1;
  static constexpr std::size_t kPrivacy = 2;

  std::array<double, kSize> values() const { return {utility_loss, training_cost, privacy_leakage}; }
  static ObjectiveVector from(std::span<const double> v) { return {v[0], v[1], v[2]}; }
  bool finite() const;
  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

enum class MetricKind { Auc, Accuracy };

inline MetricKind metric_for_classes(int classes) {
  return classes == 2 ? MetricKind::Auc : MetricKind::Accuracy;
}

// Mann-Whitney AUC; tied scores count one half. Labels are 0/1.
double auc(std::span<const double> scores, std::span<const int> labels);

// Argmax accuracy of a rows x C score matrix.
double accuracy(const Matrix& scores, std::span<const int> labels);

// 1 - U(M, D): U = AUC for binary, accuracy for multiclass. Joint inference over
// both parties' columns of `rows`.
double utility_loss(const gbdt::Forest& forest, const Matrix& features, std::span<const int> labels,
                    std::span<const std::size_t> rows);

// c_enc * t_enc + c_dec * t_dec + c_add * t_add
double training_cost(const fed::HECounters& counters, const fed::HECostModel& model);

}  // namespace cmosb::objectives
