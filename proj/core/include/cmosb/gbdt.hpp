#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cmosb/binning.hpp"
#include "cmosb/matrix.hpp"

namespace cmosb::gbdt {

struct GradientPair {
  double g = 0.0;
  double h = 0.0;  // non-negative for the supported losses
};

enum class LossKind { Logistic, Softmax };

inline LossKind loss_for_classes(int classes) {
  return classes == 2 ? LossKind::Logistic : LossKind::Softmax;
}
// Score columns per row: 1 for logistic, C for softmax.
inline int score_slots(int classes) { return classes == 2 ? 1 : classes; }

// Per class slot, per row. `raw_scores` is rows x slots.
using GradientTable = std::vector<std::vector<GradientPair>>;

GradientTable compute_gradients(std::span<const int> labels, const Matrix& raw_scores,
                                LossKind loss);

struct HistogramBin {
  double sum_g = 0.0;
  double sum_h = 0.0;
  std::size_t count = 0;

  HistogramBin& operator+=(const HistogramBin& o) {
    sum_g += o.sum_g;
    sum_h += o.sum_h;
    count += o.count;
    return *this;
  }
};

using FeatureHistogram = std::vector<HistogramBin>;

// Accumulates (g, h) of each instance into the bin of `feature`.
// `gradients` is indexed by row id.
FeatureHistogram build_histogram(const BinnedMatrix& bins, std::size_t feature,
                                 std::span<const std::size_t> instances,
                                 std::span<const GradientPair> gradients);

struct SplitParams {
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1e-3;
};

// 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)] - gamma
double split_gain(double g_left, double h_left, double g_right, double h_right,
                  const SplitParams& params);

inline double leaf_weight(double g, double h, const SplitParams& params) {
  return -g / (h + params.lambda);
}

struct HistogramRef {
  std::size_t feature;
  std::span<const HistogramBin> bins;
};

struct SplitCandidate {
  std::size_t feature = 0;
  int bin = 0;  // left child takes bins [0, bin]
  double gain = 0.0;
  HistogramBin left;
  HistogramBin right;
};

// a > b beyond floating-point noise. Gains of the same partition reached through
// different features differ only in summation order, and count as tied.
bool gain_exceeds(double a, double b);

// True when `a` should be preferred over `b`: larger gain, then lower feature, then lower bin.
bool better_split(const SplitCandidate& a, const SplitCandidate& b);

// Best cut over every (feature, bin); nullopt when no cut has positive gain
// with both children satisfying min_child_weight and non-empty.
std::optional<SplitCandidate> find_best_split(std::span<const HistogramRef> histograms,
                                              const SplitParams& params);

enum class NodeOwner { Active, Passive, Local };

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  int bin = -1;
  double threshold = 0.0;  // go left when value <= threshold
  int left = -1;
  int right = -1;
  double weight = 0.0;
  int depth = 0;
  NodeOwner owner = NodeOwner::Active;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int class_slot = 0;
  bool federated = false;

  int leaf_for_row(std::span<const double> features) const;
  int leaf_for_binned(const BinnedMatrix& bins, std::size_t row) const;
  int depth() const;
  std::size_t leaf_count() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct Forest {
  std::vector<DecisionTree> trees;
  double learning_rate = 0.3;
  LossKind loss = LossKind::Logistic;
  int class_count = 2;
  std::size_t feature_count = 0;
  BinEdges edges;

  int slots() const { return score_slots(class_count); }
  friend bool operator==(const Forest&, const Forest&) = default;
};

// rows x slots raw scores; base score 0.
Matrix predict(const Forest& forest, const Matrix& features);
Matrix predict(const Forest& forest, const Matrix& features, std::span<const std::size_t> rows);

// Adds learning_rate * tree output to the scores of `rows` (scores indexed by row id).
void add_tree_scores(const DecisionTree& tree, double learning_rate, const BinnedMatrix& bins,
                     std::span<const std::size_t> rows, Matrix& scores);

// Grows a subtree below `node` using only `columns`, depth-first, left child first.
// `node` must exist in `tree` with depth set; its instance set is `instances`.
void grow_local_subtree(DecisionTree& tree, int node, const BinnedMatrix& bins,
                        std::span<const std::size_t> columns, std::vector<std::size_t> instances,
                        std::span<const GradientPair> gradients, int max_depth,
                        const SplitParams& params, NodeOwner owner);

DecisionTree train_local_tree(const BinnedMatrix& bins, std::span<const std::size_t> columns,
                              std::span<const std::size_t> instances,
                              std::span<const GradientPair> gradients, int max_depth,
                              const SplitParams& params, NodeOwner owner = NodeOwner::Active);

// Splits instances into (left, right) by a node's bin threshold, preserving order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition_instances(
    const BinnedMatrix& bins, std::size_t feature, int bin, std::span<const std::size_t> instances);

struct BoostingParams {
  int rounds = 5;
  int max_depth = 3;
  double learning_rate = 0.3;
  SplitParams split;
};

// Plain single-party boosting over `columns` on `rows`; `scores` (rows of the
// full matrix x slots) is updated in place when provided.
Forest train_boosted(const BinnedMatrix& bins, std::span<const std::size_t> columns,
                     std::span<const int> labels, int class_count,
                     std::span<const std::size_t> rows, const BoostingParams& params,
                     Matrix* scores = nullptr);

// Mean logistic / softmax log-loss over `rows`.
double log_loss(std::span<const int> labels, const Matrix& raw_scores, LossKind loss,
                std::span<const std::size_t> rows);

double sigmoid(double x);

}  // namespace cmosb::gbdt
