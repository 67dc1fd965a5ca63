#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cmosb/leaf_log.hpp"

namespace cmosb::attack {

// Symmetric N x N co-location frequencies over the probe set, entries in [0, 1].
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t a, std::size_t b) const { return values_[a * n_ + b]; }
  void set(std::size_t a, std::size_t b, double v) {
    values_[a * n_ + b] = v;
    values_[b * n_ + a] = v;
  }
  // Every off-diagonal entry is zero.
  bool off_diagonal_zero() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Running co-location counts, one tree at a time, restricted to the probe rows.
class CoLocationCounter {
 public:
  explicit CoLocationCounter(std::span<const std::size_t> probe_rows);

  void add_tree(const fed::LoggedTree& tree);
  std::size_t tree_count() const { return trees_; }
  std::size_t logged_leaves() const { return leaves_; }
  std::size_t probe_size() const { return n_; }
  // sim(a, b) = (1/n) * #{trees in which a and b share a logged leaf}
  SimilarityMatrix similarity() const;

 private:
  std::size_t n_;
  std::vector<std::int32_t> position_of_row_;
  std::vector<std::uint32_t> counts_;
  std::size_t trees_ = 0;
  std::size_t leaves_ = 0;
  std::vector<std::size_t> scratch_;
};

// Throws ParameterError when the log covers no federated tree.
SimilarityMatrix build_similarity(const fed::LeafAssignmentLog& log,
                                  std::span<const std::size_t> probe_rows);

struct ClusterAssignment {
  std::vector<int> cluster_of;  // per probe position; cluster 0 holds position 0
  int cluster_count = 0;
  bool degenerate = false;  // similarity carried no co-location signal

  std::vector<std::size_t> sizes() const;
};

// Labeled probe positions the attacker holds, indexed by class.
struct AttackerKnowledge {
  std::vector<std::vector<std::size_t>> known;

  int class_count() const { return static_cast<int>(known.size()); }
  void validate(std::size_t probe_size) const;
};

enum class Linkage {
  Average,             // plain average linkage
  ConstrainedAverage,  // average linkage restricted to merges whose known labels stay kKnownPurity pure
};

inline constexpr double kKnownPurity = 0.75;

// Agglomerative clustering on 1 - S cut at `clusters`; among equidistant pairs
// the one with the lowest member indices merges first. ConstrainedAverage
// needs `knowledge`.
ClusterAssignment cluster_instances(const SimilarityMatrix& similarity, int clusters,
                                    Linkage linkage = Linkage::Average,
                                    const AttackerKnowledge* knowledge = nullptr);

AttackerKnowledge sample_knowledge(std::span<const int> probe_labels, int classes,
                                   std::size_t per_class, std::uint64_t seed);

// Average 1 - S between the members of two clusters.
double cluster_distance(const SimilarityMatrix& similarity, std::span<const std::size_t> a,
                        std::span<const std::size_t> b);

struct LabelInference {
  std::vector<int> predicted;       // per probe position
  std::vector<int> cluster_labels;  // per cluster
};

// Majority vote of known labels per cluster (ties to the lower class); clusters
// without a known member copy the nearest labeled cluster.
LabelInference infer_labels(const ClusterAssignment& clusters, const AttackerKnowledge& knowledge,
                            const SimilarityMatrix& similarity);

double attack_accuracy(std::span<const int> predicted, std::span<const int> truth);

struct AttackReport {
  double accuracy = 0.0;
  bool applicable = true;  // false when no leaf was ever logged
  bool degenerate = false;
  std::vector<std::size_t> cluster_sizes;
  std::vector<int> cluster_labels;
  std::vector<std::vector<std::size_t>> confusion;  // [cluster][true class]
};

AttackReport run_attack(const CoLocationCounter& counter, std::span<const int> probe_labels,
                        const AttackerKnowledge& knowledge, int classes,
                        Linkage linkage = Linkage::ConstrainedAverage);
AttackReport run_attack(const fed::LeafAssignmentLog& log, std::span<const std::size_t> probe_rows,
                        std::span<const int> probe_labels, const AttackerKnowledge& knowledge,
                        int classes, Linkage linkage = Linkage::ConstrainedAverage);

}  // namespace cmosb::attack
