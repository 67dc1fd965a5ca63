#include "cmosb/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmosb/error.hpp"

namespace cmosb::gbdt {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

GradientTable compute_gradients(std::span<const int> labels, const Matrix& raw_scores,
                                LossKind loss) {
  if (raw_scores.rows() != labels.size())
    throw ParameterError("compute_gradients: scores and labels differ in length");
  const std::size_t n = labels.size();
  if (loss == LossKind::Logistic) {
    if (raw_scores.cols() != 1) throw ParameterError("compute_gradients: logistic needs 1 slot");
    GradientTable out(1, std::vector<GradientPair>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(raw_scores(i, 0));
      out[0][i] = {p - (labels[i] == 1 ? 1.0 : 0.0), p * (1.0 - p)};
    }
    return out;
  }
  const std::size_t k = raw_scores.cols();
  if (k < 3) throw ParameterError("compute_gradients: softmax needs at least 3 slots");
  GradientTable out(k, std::vector<GradientPair>(n));
  std::vector<double> p(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k)
      throw ParameterError("compute_gradients: label outside class range");
    const auto s = raw_scores.row(i);
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) z += (p[c] = std::exp(s[c] - mx));
    for (std::size_t c = 0; c < k; ++c) {
      const double pc = p[c] / z;
      out[c][i] = {pc - (static_cast<std::size_t>(labels[i]) == c ? 1.0 : 0.0), pc * (1.0 - pc)};
    }
  }
  return out;
}

FeatureHistogram build_histogram(const BinnedMatrix& bins, std::size_t feature,
                                 std::span<const std::size_t> instances,
                                 std::span<const GradientPair> gradients) {
  FeatureHistogram hist(static_cast<std::size_t>(bins.edges().bin_count(feature)));
  for (std::size_t row : instances) {
    auto& b = hist[bins(row, feature)];
    b.sum_g += gradients[row].g;
    b.sum_h += gradients[row].h;
    ++b.count;
  }
  return hist;
}

double split_gain(double g_left, double h_left, double g_right, double h_right,
                  const SplitParams& params) {
  const double g = g_left + g_right;
  const double h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + params.lambda) +
                g_right * g_right / (h_right + params.lambda) - g * g / (h + params.lambda)) -
         params.gamma;
}

bool gain_exceeds(double a, double b) {
  return a - b > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool better_split(const SplitCandidate& a, const SplitCandidate& b) {
  if (gain_exceeds(a.gain, b.gain)) return true;
  if (gain_exceeds(b.gain, a.gain)) return false;
  if (a.feature != b.feature) return a.feature < b.feature;
  return a.bin < b.bin;
}

std::optional<SplitCandidate> find_best_split(std::span<const HistogramRef> histograms,
                                              const SplitParams& params) {
  std::optional<SplitCandidate> best;
  for (const auto& ref : histograms) {
    HistogramBin total;
    for (const auto& b : ref.bins) total += b;
    HistogramBin left;
    for (std::size_t b = 0; b + 1 < ref.bins.size(); ++b) {
      left += ref.bins[b];
      HistogramBin right{total.sum_g - left.sum_g, total.sum_h - left.sum_h,
                         total.count - left.count};
      if (left.count == 0 || right.count == 0) continue;
      if (left.sum_h < params.min_child_weight || right.sum_h < params.min_child_weight) continue;
      SplitCandidate c{ref.feature, static_cast<int>(b),
                       split_gain(left.sum_g, left.sum_h, right.sum_g, right.sum_h, params), left,
                       right};
      if (!(c.gain > 0.0)) continue;
      if (!best || better_split(c, *best)) best = c;
    }
  }
  return best;
}

int DecisionTree::leaf_for_row(std::span<const double> features) const {
  int id = 0;
  while (!nodes[id].is_leaf()) {
    const auto& n = nodes[id];
    id = features[n.feature] <= n.threshold ? n.left : n.right;
  }
  return id;
}

int DecisionTree::leaf_for_binned(const BinnedMatrix& bins, std::size_t row) const {
  int id = 0;
  while (!nodes[id].is_leaf()) {
    const auto& n = nodes[id];
    id = bins(row, n.feature) <= n.bin ? n.left : n.right;
  }
  return id;
}

int DecisionTree::depth() const {
  int d = 0;
  for (const auto& n : nodes)
    if (n.is_leaf()) d = std::max(d, n.depth);
  return d;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

Matrix predict(const Forest& forest, const Matrix& features, std::span<const std::size_t> rows) {
  if (features.cols() != forest.feature_count)
    throw ParameterError("predict: feature count " + std::to_string(features.cols()) +
                         " does not match training schema " +
                         std::to_string(forest.feature_count));
  Matrix scores(rows.size(), static_cast<std::size_t>(forest.slots()));
  for (const auto& tree : forest.trees) {
    if (tree.nodes.empty()) continue;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int leaf = tree.leaf_for_row(features.row(rows[i]));
      scores(i, static_cast<std::size_t>(tree.class_slot)) +=
          forest.learning_rate * tree.nodes[leaf].weight;
    }
  }
  return scores;
}

Matrix predict(const Forest& forest, const Matrix& features) {
  std::vector<std::size_t> rows(features.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return predict(forest, features, rows);
}

void add_tree_scores(const DecisionTree& tree, double learning_rate, const BinnedMatrix& bins,
                     std::span<const std::size_t> rows, Matrix& scores) {
  for (std::size_t row : rows) {
    const int leaf = tree.leaf_for_binned(bins, row);
    scores(row, static_cast<std::size_t>(tree.class_slot)) += learning_rate * tree.nodes[leaf].weight;
  }
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition_instances(
    const BinnedMatrix& bins, std::size_t feature, int bin, std::span<const std::size_t> instances) {
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t row : instances) (bins(row, feature) <= bin ? out.first : out.second).push_back(row);
  return out;
}

void grow_local_subtree(DecisionTree& tree, int node, const BinnedMatrix& bins,
                        std::span<const std::size_t> columns, std::vector<std::size_t> instances,
                        std::span<const GradientPair> gradients, int max_depth,
                        const SplitParams& params, NodeOwner owner) {
  double g = 0.0;
  double h = 0.0;
  for (std::size_t row : instances) {
    g += gradients[row].g;
    h += gradients[row].h;
  }
  tree.nodes[node].owner = owner;
  tree.nodes[node].weight = leaf_weight(g, h, params);
  if (tree.nodes[node].depth >= max_depth || instances.size() < 2) return;

  std::vector<FeatureHistogram> hists;
  hists.reserve(columns.size());
  std::vector<HistogramRef> refs;
  for (std::size_t f : columns) hists.push_back(build_histogram(bins, f, instances, gradients));
  for (std::size_t i = 0; i < columns.size(); ++i) refs.push_back({columns[i], hists[i]});
  const auto best = find_best_split(refs, params);
  if (!best) return;

  auto [left_rows, right_rows] = partition_instances(bins, best->feature, best->bin, instances);
  instances.clear();
  instances.shrink_to_fit();

  const int depth = tree.nodes[node].depth;
  const int left = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(TreeNode{.depth = depth + 1, .owner = owner});
  const int right = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(TreeNode{.depth = depth + 1, .owner = owner});
  auto& n = tree.nodes[node];
  n.feature = static_cast<int>(best->feature);
  n.bin = best->bin;
  n.threshold = bins.edges().cut_value(best->feature, best->bin);
  n.left = left;
  n.right = right;
  grow_local_subtree(tree, left, bins, columns, std::move(left_rows), gradients, max_depth, params,
                     owner);
  grow_local_subtree(tree, right, bins, columns, std::move(right_rows), gradients, max_depth,
                     params, owner);
}

DecisionTree train_local_tree(const BinnedMatrix& bins, std::span<const std::size_t> columns,
                              std::span<const std::size_t> instances,
                              std::span<const GradientPair> gradients, int max_depth,
                              const SplitParams& params, NodeOwner owner) {
  if (instances.empty()) throw ParameterError("train_local_tree: empty instance set");
  DecisionTree tree;
  tree.nodes.push_back(TreeNode{.depth = 0, .owner = owner});
  grow_local_subtree(tree, 0, bins, columns, {instances.begin(), instances.end()}, gradients,
                     max_depth, params, owner);
  return tree;
}

Forest train_boosted(const BinnedMatrix& bins, std::span<const std::size_t> columns,
                     std::span<const int> labels, int class_count,
                     std::span<const std::size_t> rows, const BoostingParams& params,
                     Matrix* scores) {
  Forest forest;
  forest.learning_rate = params.learning_rate;
  forest.loss = loss_for_classes(class_count);
  forest.class_count = class_count;
  forest.feature_count = bins.cols();
  forest.edges = bins.edges();

  Matrix local(bins.rows(), static_cast<std::size_t>(forest.slots()));
  Matrix& s = scores ? *scores : local;
  for (int round = 0; round < params.rounds; ++round) {
    const auto grads = compute_gradients(labels, s, forest.loss);
    for (int slot = 0; slot < forest.slots(); ++slot) {
      auto tree = train_local_tree(bins, columns, rows, grads[slot], params.max_depth, params.split);
      tree.class_slot = slot;
      add_tree_scores(tree, forest.learning_rate, bins, rows, s);
      forest.trees.push_back(std::move(tree));
    }
  }
  return forest;
}

double log_loss(std::span<const int> labels, const Matrix& raw_scores, LossKind loss,
                std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t row : rows) {
    if (loss == LossKind::Logistic) {
      const double s = raw_scores(row, 0);
      // log(1 + e^{-s}) for y=1, log(1 + e^{s}) for y=0, written stably.
      const double z = labels[row] == 1 ? -s : s;
      total += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    } else {
      const auto s = raw_scores.row(row);
      const double mx = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (double v : s) z += std::exp(v - mx);
      total += mx + std::log(z) - s[static_cast<std::size_t>(labels[row])];
    }
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace cmosb::gbdt
