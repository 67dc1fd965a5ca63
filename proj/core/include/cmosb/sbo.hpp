#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cmosb/attack.hpp"
#include "cmosb/binning.hpp"
#include "cmosb/data.hpp"
#include "cmosb/gbdt.hpp"
#include "cmosb/he_scheme.hpp"
#include "cmosb/leaf_log.hpp"
#include "cmosb/metrics.hpp"
#include "cmosb/protocol.hpp"

namespace cmosb::fed {

// SBO hyperparameters. validate() accepts the trainer's range, which is wider
// than the optimizer's search space: baselines run n_f = 20 and unit tests
// use p = 0 or n_l = 0.
struct TrainingConfig {
  int federated_rounds = 5;  // n_f
  int local_rounds = 0;      // n_l
  int max_depth = 3;         // d
  double subsample = 0.8;    // r
  double purity_threshold = 1.0;  // p
  double learning_rate = 0.3;     // eta
  bool complete_secure = false;
  bool purity_defense = true;  // false: never hand a node to the active party for local growth

  // Throws ParameterError naming the field and its accepted range.
  void validate() const;
  // Inside the optimizer's search ranges.
  bool within_search_space() const;

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

// Fraction of `instances` carrying the majority label.
double node_purity(std::span<const std::size_t> instances, std::span<const int> labels);

struct ContextOptions {
  std::size_t active_count = 0;  // 0: half the columns, rounded down, at least 1
  bool shuffled_partition = false;
  int bins = gbdt::kDefaultBins;
  std::size_t probe_per_class = 50;
  std::size_t known_per_class = 5;
  gbdt::SplitParams split;
  HECostModel cost_model;
  BackendKind backend = BackendKind::Counting;
  int modulus_bits = paillier::kDefaultModulusBits;
};

// Everything an SBO run needs besides its hyperparameters and seed. Read-only
// once prepared, so concurrent runs may share one context.
struct TrainingContext {
  std::shared_ptr<const data::Dataset> dataset;
  data::VerticalPartition partition;
  data::SplitIndices split;
  gbdt::BinnedMatrix bins;  // all rows, edges from train rows
  std::vector<std::size_t> probe_rows;  // I_pl, dataset row ids
  std::vector<int> probe_labels;
  attack::AttackerKnowledge knowledge;
  gbdt::SplitParams split_params;
  HECostModel cost_model;
  BackendKind backend = BackendKind::Counting;
  int modulus_bits = paillier::kDefaultModulusBits;

  int class_count() const { return dataset->class_count; }

  static TrainingContext prepare(std::shared_ptr<const data::Dataset> dataset,
                                 const ContextOptions& options, std::uint64_t seed);
};

struct RoundMetrics {
  int round = 0;
  double cost = 0.0;     // eps_c,i
  double leakage = 0.0;  // eps_p,i
  HECounters counters;   // deltas of this round
  std::size_t logged_leaves = 0;
};

struct SboResult {
  gbdt::Forest forest;
  LeafAssignmentLog log;
  HECounters counters;
  std::vector<RoundMetrics> rounds;
  objectives::ObjectiveVector objectives;
  std::size_t federated_splits = 0;  // splits chosen by split finding
  std::size_t passive_splits = 0;
};

SboResult sbo_train(const TrainingConfig& config, const TrainingContext& ctx, std::uint64_t seed,
                    const TranscriptSink* transcript = nullptr);

}  // namespace cmosb::fed
