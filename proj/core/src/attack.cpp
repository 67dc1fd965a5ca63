#include "cmosb/attack.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "cmosb/error.hpp"
#include "cmosb/random.hpp"

namespace cmosb::attack {

bool SimilarityMatrix::off_diagonal_zero() const {
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = a + 1; b < n_; ++b)
      if (values_[a * n_ + b] != 0.0) return false;
  return true;
}

CoLocationCounter::CoLocationCounter(std::span<const std::size_t> probe_rows)
    : n_(probe_rows.size()), counts_(n_ * n_, 0) {
  std::size_t max_row = 0;
  for (std::size_t r : probe_rows) max_row = std::max(max_row, r);
  position_of_row_.assign(probe_rows.empty() ? 0 : max_row + 1, -1);
  for (std::size_t p = 0; p < n_; ++p) {
    if (position_of_row_[probe_rows[p]] >= 0)
      throw ParameterError("attack: probe set contains a duplicate row");
    position_of_row_[probe_rows[p]] = static_cast<std::int32_t>(p);
  }
}

void CoLocationCounter::add_tree(const fed::LoggedTree& tree) {
  ++trees_;
  for (const auto& leaf : tree.leaves) {
    ++leaves_;
    scratch_.clear();
    for (std::size_t row : leaf.instances)
      if (row < position_of_row_.size() && position_of_row_[row] >= 0)
        scratch_.push_back(static_cast<std::size_t>(position_of_row_[row]));
    // Leaves are disjoint within a tree, so each pair is counted at most once per tree.
    for (std::size_t i = 0; i < scratch_.size(); ++i) {
      const std::size_t a = scratch_[i];
      ++counts_[a * n_ + a];
      for (std::size_t j = i + 1; j < scratch_.size(); ++j) {
        const std::size_t b = scratch_[j];
        ++counts_[a * n_ + b];
        ++counts_[b * n_ + a];
      }
    }
  }
}

SimilarityMatrix CoLocationCounter::similarity() const {
  SimilarityMatrix s(n_);
  if (trees_ == 0) return s;
  const double inv = 1.0 / static_cast<double>(trees_);
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = a; b < n_; ++b) s.set(a, b, counts_[a * n_ + b] * inv);
  return s;
}

SimilarityMatrix build_similarity(const fed::LeafAssignmentLog& log,
                                  std::span<const std::size_t> probe_rows) {
  if (log.trees.empty()) throw ParameterError("build_similarity: log covers no federated tree");
  CoLocationCounter counter(probe_rows);
  for (const auto& t : log.trees) counter.add_tree(t);
  return counter.similarity();
}

std::vector<std::size_t> ClusterAssignment::sizes() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(cluster_count), 0);
  for (int c : cluster_of) ++out[static_cast<std::size_t>(c)];
  return out;
}

ClusterAssignment cluster_instances(const SimilarityMatrix& similarity, int clusters,
                                    Linkage linkage, const AttackerKnowledge* knowledge) {
  const std::size_t n = similarity.size();
  if (clusters < 2) throw ParameterError("cluster_instances: need at least two clusters");
  if (static_cast<std::size_t>(clusters) > n)
    throw ParameterError("cluster_instances: more clusters than probe instances");

  ClusterAssignment out;
  out.cluster_count = clusters;
  out.cluster_of.resize(n);
  // Known-label counts of each live cluster.
  std::vector<std::vector<std::size_t>> known(n);
  const bool constrained = linkage == Linkage::ConstrainedAverage;
  if (constrained) {
    if (!knowledge) throw ParameterError("cluster_instances: constrained linkage needs attacker knowledge");
    knowledge->validate(n);
    std::vector<int> tag(n, -1);
    for (std::size_t k = 0; k < knowledge->known.size(); ++k)
      for (std::size_t p : knowledge->known[k]) {
        if (tag[p] >= 0 && tag[p] != static_cast<int>(k))
          throw ParameterError("cluster_instances: position known under two classes");
        tag[p] = static_cast<int>(k);
        known[p].assign(knowledge->known.size(), 0);
        known[p][k] = 1;
      }
  }
  auto compatible = [&](std::size_t i, std::size_t j) {
    if (known[i].empty() || known[j].empty()) return true;
    std::size_t total = 0;
    std::size_t top = 0;
    for (std::size_t k = 0; k < known[i].size(); ++k) {
      total += known[i][k] + known[j][k];
      top = std::max(top, known[i][k] + known[j][k]);
    }
    return static_cast<double>(top) >= kKnownPurity * static_cast<double>(total);
  };

  if (similarity.off_diagonal_zero()) {
    out.degenerate = true;
    for (std::size_t i = 0; i < n; ++i)
      out.cluster_of[i] = static_cast<int>((i * static_cast<std::size_t>(clusters)) / n);
    return out;
  }

  std::vector<double> dist(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) dist[a * n + b] = 1.0 - similarity(a, b);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<std::size_t> alive(n);
  std::iota(alive.begin(), alive.end(), std::size_t{0});

  // Cheapest-pair scan over live clusters; each live cluster is represented by
  // its lowest member index, so scan order realizes the tie-breaking rule.
  while (alive.size() > static_cast<std::size_t>(clusters)) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    bool found = false;
    for (std::size_t x = 0; x < alive.size(); ++x) {
      const std::size_t i = alive[x];
      const double* row = &dist[i * n];
      for (std::size_t y = x + 1; y < alive.size(); ++y) {
        const std::size_t j = alive[y];
        if (constrained && !compatible(i, j)) continue;
        const double d = row[j];
        if (!found || d < best) {
          found = true;
          best = d;
          bi = x;
          bj = y;
        }
      }
    }
    // Every remaining pair would mix known labels.
    if (!found) break;
    const std::size_t i = alive[bi];
    const std::size_t j = alive[bj];
    const double wi = static_cast<double>(size[i]);
    const double wj = static_cast<double>(size[j]);
    for (std::size_t k : alive) {
      if (k == i || k == j) continue;
      const double d = (wi * dist[i * n + k] + wj * dist[j * n + k]) / (wi + wj);
      dist[i * n + k] = d;
      dist[k * n + i] = d;
    }
    size[i] += size[j];
    parent[j] = i;
    if (known[i].empty()) {
      known[i] = std::move(known[j]);
    } else if (!known[j].empty()) {
      for (std::size_t k = 0; k < known[i].size(); ++k) known[i][k] += known[j][k];
    }
    alive.erase(alive.begin() + static_cast<long>(bj));
  }

  out.cluster_count = static_cast<int>(alive.size());
  std::vector<int> id_of_root(n, -1);
  for (std::size_t c = 0; c < alive.size(); ++c) id_of_root[alive[c]] = static_cast<int>(c);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t r = p;
    while (parent[r] != r) r = parent[r];
    out.cluster_of[p] = id_of_root[r];
  }
  return out;
}

void AttackerKnowledge::validate(std::size_t probe_size) const {
  for (std::size_t k = 0; k < known.size(); ++k) {
    if (known[k].empty())
      throw ParameterError("attacker knowledge: class " + std::to_string(k) +
                           " has no labeled instance");
    for (std::size_t p : known[k])
      if (p >= probe_size) throw ParameterError("attacker knowledge: position outside probe");
  }
}

AttackerKnowledge sample_knowledge(std::span<const int> probe_labels, int classes,
                                   std::size_t per_class, std::uint64_t seed) {
  if (per_class == 0) throw ParameterError("sample_knowledge: per_class must be positive");
  std::vector<std::vector<std::size_t>> pools(static_cast<std::size_t>(classes));
  for (std::size_t p = 0; p < probe_labels.size(); ++p) {
    const int y = probe_labels[p];
    if (y < 0 || y >= classes) throw ParameterError("sample_knowledge: label outside class range");
    pools[static_cast<std::size_t>(y)].push_back(p);
  }
  Rng rng(derive_seed(seed, {0x4b0}));
  AttackerKnowledge k;
  k.known.resize(pools.size());
  for (std::size_t c = 0; c < pools.size(); ++c) {
    auto& pool = pools[c];
    if (pool.empty())
      throw SamplingError("sample_knowledge: class " + std::to_string(c) + " absent from probe");
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t take = std::min(per_class, pool.size());
    k.known[c].assign(pool.begin(), pool.begin() + static_cast<long>(take));
    std::sort(k.known[c].begin(), k.known[c].end());
  }
  return k;
}

double cluster_distance(const SimilarityMatrix& similarity, std::span<const std::size_t> a,
                        std::span<const std::size_t> b) {
  if (a.empty() || b.empty()) return 1.0;
  double total = 0.0;
  for (std::size_t x : a)
    for (std::size_t y : b) total += 1.0 - similarity(x, y);
  return total / static_cast<double>(a.size() * b.size());
}

LabelInference infer_labels(const ClusterAssignment& clusters, const AttackerKnowledge& knowledge,
                            const SimilarityMatrix& similarity) {
  const auto c_count = static_cast<std::size_t>(clusters.cluster_count);
  const auto k_count = knowledge.known.size();
  std::vector<std::vector<std::size_t>> votes(c_count, std::vector<std::size_t>(k_count, 0));
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t p : knowledge.known[k]) ++votes[static_cast<std::size_t>(clusters.cluster_of[p])][k];

  LabelInference out;
  out.cluster_labels.assign(c_count, -1);
  for (std::size_t c = 0; c < c_count; ++c) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < k_count; ++k) {
      if (votes[c][k] > best) {
        best = votes[c][k];
        out.cluster_labels[c] = static_cast<int>(k);
      }
    }
  }

  std::vector<std::vector<std::size_t>> members(c_count);
  for (std::size_t p = 0; p < clusters.cluster_of.size(); ++p)
    members[static_cast<std::size_t>(clusters.cluster_of[p])].push_back(p);
  const auto voted = out.cluster_labels;
  for (std::size_t c = 0; c < c_count; ++c) {
    if (voted[c] >= 0) continue;
    double best = std::numeric_limits<double>::infinity();
    int label = 0;
    for (std::size_t o = 0; o < c_count; ++o) {
      if (voted[o] < 0) continue;
      const double d = cluster_distance(similarity, members[c], members[o]);
      if (d < best) {
        best = d;
        label = voted[o];
      }
    }
    out.cluster_labels[c] = label;
  }

  out.predicted.resize(clusters.cluster_of.size());
  for (std::size_t p = 0; p < out.predicted.size(); ++p)
    out.predicted[p] = out.cluster_labels[static_cast<std::size_t>(clusters.cluster_of[p])];
  return out;
}

double attack_accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw ParameterError("attack_accuracy: prediction and truth differ in length");
  if (truth.empty()) throw ParameterError("attack_accuracy: empty probe");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

AttackReport run_attack(const CoLocationCounter& counter, std::span<const int> probe_labels,
                        const AttackerKnowledge& knowledge, int classes, Linkage linkage) {
  if (probe_labels.size() != counter.probe_size())
    throw ParameterError("run_attack: probe labels do not match probe size");
  knowledge.validate(probe_labels.size());
  AttackReport report;
  if (counter.logged_leaves() == 0) {
    report.accuracy = 1.0 / static_cast<double>(classes);
    report.applicable = false;
    report.degenerate = true;
    return report;
  }
  const auto sim = counter.similarity();
  const auto clusters = cluster_instances(sim, classes, linkage, &knowledge);
  const auto inferred = infer_labels(clusters, knowledge, sim);
  report.accuracy = attack_accuracy(inferred.predicted, probe_labels);
  report.degenerate = clusters.degenerate;
  report.cluster_sizes = clusters.sizes();
  report.cluster_labels = inferred.cluster_labels;
  report.confusion.assign(static_cast<std::size_t>(clusters.cluster_count),
                          std::vector<std::size_t>(static_cast<std::size_t>(classes), 0));
  for (std::size_t p = 0; p < probe_labels.size(); ++p)
    ++report.confusion[static_cast<std::size_t>(clusters.cluster_of[p])]
                      [static_cast<std::size_t>(probe_labels[p])];
  return report;
}

AttackReport run_attack(const fed::LeafAssignmentLog& log, std::span<const std::size_t> probe_rows,
                        std::span<const int> probe_labels, const AttackerKnowledge& knowledge,
                        int classes, Linkage linkage) {
  CoLocationCounter counter(probe_rows);
  for (const auto& t : log.trees) counter.add_tree(t);
  return run_attack(counter, probe_labels, knowledge, classes, linkage);
}

}  // namespace cmosb::attack
