#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <set>

#include "cmosb/attack.hpp"
#include "cmosb/error.hpp"

using namespace cmosb;
using namespace cmosb::attack;

namespace {

SimilarityMatrix blocks(const std::vector<int>& block_of, double within, double across) {
  SimilarityMatrix s(block_of.size());
  for (std::size_t a = 0; a < block_of.size(); ++a)
    for (std::size_t b = a; b < block_of.size(); ++b)
      s.set(a, b, a == b ? 1.0 : block_of[a] == block_of[b] ? within : across);
  return s;
}

// Fraction of positions on which two labelings agree, maximized over relabelings.
double agreement(const std::vector<int>& a, const std::vector<int>& b, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < a.size(); ++i) hit += perm[static_cast<std::size_t>(a[i])] == b[i];
    best = std::max(best, hit);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(a.size());
}

fed::LoggedTree tree_of(const std::vector<std::vector<std::size_t>>& leaves) {
  fed::LoggedTree t;
  int id = 0;
  for (const auto& l : leaves) t.leaves.push_back({id++, l});
  return t;
}

}  // namespace

TEST(Similarity, PlugInExamples) {
  fed::LeafAssignmentLog log;
  log.trees.push_back(tree_of({{0, 1}, {2}}));
  log.trees.push_back(tree_of({{0, 1, 2}}));
  const std::size_t probe[] = {0, 1, 2, 3};
  const auto s = build_similarity(log, probe);
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s(0, 2), 0.5);
  EXPECT_DOUBLE_EQ(s(2, 1), 0.5);
  EXPECT_DOUBLE_EQ(s(0, 3), 0.0);
  EXPECT_DOUBLE_EQ(s(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(s(3, 3), 0.0);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      EXPECT_EQ(s(a, b), s(b, a));
      EXPECT_GE(s(a, b), 0.0);
      EXPECT_LE(s(a, b), 1.0);
    }
}

TEST(Similarity, RowsOutsideProbeIgnored) {
  fed::LeafAssignmentLog log;
  log.trees.push_back(tree_of({{7, 3, 9}, {4, 8}}));
  const std::size_t probe[] = {9, 8, 7};
  const auto s = build_similarity(log, probe);
  EXPECT_DOUBLE_EQ(s(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(s(1, 1), 1.0);
}

TEST(Similarity, NoTreesIsError) {
  const std::size_t probe[] = {0, 1};
  EXPECT_THROW(build_similarity({}, probe), ParameterError);
}

TEST(Cluster, TwoPerfectBlocks) {
  const std::vector<int> truth{0, 1, 0, 1, 1, 0, 0, 1};
  for (auto linkage : {Linkage::Average, Linkage::ConstrainedAverage}) {
    AttackerKnowledge k{{{0}, {1}}};
    const auto c = cluster_instances(blocks(truth, 1.0, 0.0), 2, linkage, &k);
    EXPECT_EQ(c.cluster_count, 2);
    EXPECT_FALSE(c.degenerate);
    EXPECT_EQ(agreement(c.cluster_of, truth, 2), 1.0);
    EXPECT_EQ(c.cluster_of[0], 0);
  }
}

TEST(Cluster, ThreePerfectBlocks) {
  const std::vector<int> truth{2, 0, 1, 1, 0, 2, 2, 1, 0};
  for (auto linkage : {Linkage::Average, Linkage::ConstrainedAverage}) {
    AttackerKnowledge k{{{1}, {2}, {0}}};
    const auto c = cluster_instances(blocks(truth, 1.0, 0.0), 3, linkage, &k);
    EXPECT_EQ(c.cluster_count, 3);
    EXPECT_EQ(agreement(c.cluster_of, truth, 3), 1.0);
    const auto sizes = c.sizes();
    EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 3}));
  }
}

TEST(Cluster, NoisyBlocksAgreeWithExhaustiveOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> noise(-0.08, 0.08);
  std::vector<int> truth(40);
  for (std::size_t i = 0; i < 40; ++i) truth[i] = (i * 7 + 3) % 40 < 20;
  SimilarityMatrix s(40);
  for (std::size_t a = 0; a < 40; ++a)
    for (std::size_t b = a; b < 40; ++b)
      s.set(a, b, a == b ? 1.0 : (truth[a] == truth[b] ? 0.9 : 0.1) + noise(rng));
  const auto c = cluster_instances(s, 2);
  EXPECT_GE(agreement(c.cluster_of, truth, 2), 0.95);

  // Exhaustive oracle on a 12-instance subsample: the 2-partition with the
  // largest within-cluster surplus over 0.5.
  std::vector<std::size_t> sub(40);
  std::iota(sub.begin(), sub.end(), std::size_t{0});
  std::shuffle(sub.begin(), sub.end(), rng);
  sub.resize(12);
  double best = -1e9;
  std::vector<int> oracle;
  for (unsigned mask = 0; mask < (1u << 11); ++mask) {
    std::vector<int> side(12);
    for (int i = 0; i < 11; ++i) side[static_cast<std::size_t>(i + 1)] = (mask >> i) & 1;
    double score = 0;
    for (std::size_t a = 0; a < 12; ++a)
      for (std::size_t b = a + 1; b < 12; ++b)
        if (side[a] == side[b]) score += s(sub[a], sub[b]) - 0.5;
    if (score > best) best = score, oracle = side;
  }
  std::vector<int> mine(12);
  for (std::size_t i = 0; i < 12; ++i) mine[i] = c.cluster_of[sub[i]];
  EXPECT_GE(agreement(mine, oracle, 2), 11.0 / 12.0);
}

TEST(Cluster, DegenerateFallsBackToIndexBlocks) {
  SimilarityMatrix s(7);
  for (std::size_t i = 0; i < 7; ++i) s.set(i, i, 0.5);
  const auto c = cluster_instances(s, 2);
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.cluster_count, 2);
  std::set<int> seen(c.cluster_of.begin(), c.cluster_of.end());
  EXPECT_EQ(seen.size(), 2u);
  EXPECT_TRUE(std::is_sorted(c.cluster_of.begin(), c.cluster_of.end()));
}

TEST(Cluster, Preconditions) {
  SimilarityMatrix s(3);
  EXPECT_THROW(cluster_instances(s, 1), ParameterError);
  EXPECT_THROW(cluster_instances(s, 4), ParameterError);
  EXPECT_THROW(cluster_instances(s, 2, Linkage::ConstrainedAverage, nullptr), ParameterError);
}

TEST(Cluster, ConstrainedKeepsKnownLabelsPure) {
  // Sparse similarity where plain average linkage chains into one giant cluster.
  std::mt19937_64 rng(3);
  std::vector<int> truth(60);
  for (std::size_t i = 0; i < 60; ++i) truth[i] = i % 2;
  SimilarityMatrix s(60);
  std::bernoulli_distribution coin(0.15);
  for (std::size_t a = 0; a < 60; ++a)
    for (std::size_t b = a + 1; b < 60; ++b)
      if (coin(rng)) s.set(a, b, truth[a] == truth[b] ? 0.3 : 0.1);
  AttackerKnowledge k{{{0, 2, 4, 6, 8}, {1, 3, 5, 7, 9}}};
  const auto c = cluster_instances(s, 2, Linkage::ConstrainedAverage, &k);
  std::set<int> ids(c.cluster_of.begin(), c.cluster_of.end());
  EXPECT_EQ(static_cast<int>(ids.size()), c.cluster_count);
  std::vector<std::array<int, 2>> counts(static_cast<std::size_t>(c.cluster_count));
  for (int cls = 0; cls < 2; ++cls)
    for (std::size_t p : k.known[static_cast<std::size_t>(cls)])
      ++counts[static_cast<std::size_t>(c.cluster_of[p])][static_cast<std::size_t>(cls)];
  for (const auto& n : counts) {
    const int total = n[0] + n[1];
    if (total) EXPECT_GE(std::max(n[0], n[1]), kKnownPurity * total);
  }
}

TEST(Cluster, StrayKnownLabelDoesNotSplitPureBlock) {
  const std::vector<int> block{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  // Position 0 sits in block 0 but is known as class 1.
  AttackerKnowledge k{{{1, 2, 3}, {0, 6, 7, 8}}};
  const auto c = cluster_instances(blocks(block, 1.0, 0.0), 2, Linkage::ConstrainedAverage, &k);
  EXPECT_EQ(c.cluster_count, 2);
  EXPECT_EQ(agreement(c.cluster_of, block, 2), 1.0);
}

TEST(Knowledge, Validation) {
  AttackerKnowledge ok{{{0}, {1}}};
  EXPECT_NO_THROW(ok.validate(2));
  EXPECT_THROW((AttackerKnowledge{{{0}, {}}}.validate(2)), ParameterError);
  EXPECT_THROW((AttackerKnowledge{{{0}, {5}}}.validate(2)), ParameterError);
  SimilarityMatrix s(2);
  AttackerKnowledge clash{{{0}, {0}}};
  EXPECT_THROW(cluster_instances(s, 2, Linkage::ConstrainedAverage, &clash), ParameterError);
}

TEST(Knowledge, SampleIsBalancedAndDeterministic) {
  std::vector<int> labels(90);
  for (std::size_t i = 0; i < 90; ++i) labels[i] = static_cast<int>(i % 3);
  const auto a = sample_knowledge(labels, 3, 4, 11);
  const auto b = sample_knowledge(labels, 3, 4, 11);
  EXPECT_EQ(a.known, b.known);
  ASSERT_EQ(a.class_count(), 3);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(a.known[static_cast<std::size_t>(c)].size(), 4u);
    for (std::size_t p : a.known[static_cast<std::size_t>(c)]) EXPECT_EQ(labels[p], c);
  }
}

TEST(Infer, PerfectClustersOneKnownEach) {
  ClusterAssignment c{{0, 0, 1, 1, 2, 2}, 3};
  AttackerKnowledge k{{{5}, {0}, {3}}};
  const auto r = infer_labels(c, k, blocks({0, 0, 1, 1, 2, 2}, 1, 0));
  EXPECT_EQ(r.predicted, (std::vector<int>{1, 1, 2, 2, 0, 0}));
  EXPECT_EQ(r.cluster_labels, (std::vector<int>{1, 2, 0}));
}

TEST(Infer, MajorityAndTies) {
  ClusterAssignment c{{0, 0, 0, 0, 1, 1, 1}, 2};
  // Cluster 0 holds known {0, 0, 1}; cluster 1 holds one of each.
  AttackerKnowledge k{{{0, 1, 4}, {2, 5}}};
  const auto r = infer_labels(c, k, blocks({0, 0, 0, 0, 1, 1, 1}, 1, 0));
  EXPECT_EQ(r.cluster_labels, (std::vector<int>{0, 0}));
}

TEST(Infer, UnlabeledClusterCopiesNearestByAverageDistance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<int> cl{0, 0, 1, 1, 2, 2, 2};
    SimilarityMatrix s(7);
    for (std::size_t a = 0; a < 7; ++a)
      for (std::size_t b = a; b < 7; ++b) s.set(a, b, a == b ? 1.0 : U(rng));
    ClusterAssignment c{cl, 3};
    AttackerKnowledge k{{{0}, {2}}};
    const auto r = infer_labels(c, k, s);
    // Oracle: mean 1 - S from cluster 2 to each labeled cluster.
    auto dist = [&](int other) {
      double sum = 0;
      int n = 0;
      for (std::size_t a = 0; a < 7; ++a)
        for (std::size_t b = 0; b < 7; ++b)
          if (cl[a] == 2 && cl[b] == other) sum += 1 - s(a, b), ++n;
      return sum / n;
    };
    const int want = dist(1) < dist(0) ? 1 : 0;
    EXPECT_EQ(r.cluster_labels[2], want) << trial;
    EXPECT_EQ(r.predicted[6], want);
  }
}

TEST(Accuracy, Examples) {
  const std::vector<int> y{0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(attack_accuracy(y, y), 1.0);
  const std::vector<int> inv{1, 0, 0, 1};
  EXPECT_DOUBLE_EQ(attack_accuracy(inv, y), 0.0);
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  std::vector<int> truth(1000), guess(1000);
  for (std::size_t i = 0; i < 1000; ++i) truth[i] = i % 2, guess[i] = coin(rng);
  EXPECT_NEAR(attack_accuracy(guess, truth), 0.5, 0.05);
}

TEST(Attack, ChanceFloorOnEmptyLog) {
  for (int classes : {2, 3, 5}) {
    std::vector<std::size_t> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < 10u * static_cast<std::size_t>(classes); ++i) {
      rows.push_back(i);
      labels.push_back(static_cast<int>(i) % classes);
    }
    const auto k = sample_knowledge(labels, classes, 2, 1);
    fed::LeafAssignmentLog log;
    log.trees.push_back({});
    const auto r = run_attack(log, rows, labels, k, classes);
    EXPECT_EQ(r.accuracy, 1.0 / classes);
    EXPECT_FALSE(r.applicable);
  }
}

TEST(Attack, PermutationEquivariance) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0, 1);
  const std::size_t n = 24;
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 3);
  SimilarityMatrix s(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b)
      s.set(a, b, a == b ? 1.0 : (labels[a] == labels[b] ? 0.4 : 0.0) + 0.6 * U(rng));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  // Position i of the permuted problem is position perm[i] of the original.
  SimilarityMatrix sp(n);
  std::vector<int> lp(n);
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    lp[i] = labels[perm[i]];
    inv[perm[i]] = i;
    for (std::size_t j = i; j < n; ++j) sp.set(i, j, s(perm[i], perm[j]));
  }
  AttackerKnowledge k{{{0, 3}, {1, 4}, {2, 5}}};
  AttackerKnowledge kp;
  for (const auto& cls : k.known) {
    kp.known.emplace_back();
    for (std::size_t p : cls) kp.known.back().push_back(inv[p]);
  }
  for (auto linkage : {Linkage::Average, Linkage::ConstrainedAverage}) {
    const auto c = cluster_instances(s, 3, linkage, &k);
    const auto cp = cluster_instances(sp, 3, linkage, &kp);
    ASSERT_EQ(c.cluster_count, cp.cluster_count);
    // Same partition after mapping positions.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        EXPECT_EQ(c.cluster_of[perm[i]] == c.cluster_of[perm[j]], cp.cluster_of[i] == cp.cluster_of[j]);
    const double acc = attack_accuracy(infer_labels(c, k, s).predicted, labels);
    const double accp = attack_accuracy(infer_labels(cp, kp, sp).predicted, lp);
    EXPECT_DOUBLE_EQ(acc, accp);
  }
}

TEST(Attack, PurityLinkOnSingleTreeLogs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (int classes : {2, 3}) {
      std::mt19937_64 rng(seed);
      const std::size_t n = 30u * static_cast<std::size_t>(classes);
      std::vector<int> labels(n);
      for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i) % classes;
      // One leaf per class, each >= 90% pure: swap a few members across leaves.
      std::vector<std::vector<std::size_t>> leaves(static_cast<std::size_t>(classes));
      std::bernoulli_distribution stray(0.05);
      std::uniform_int_distribution<int> other(1, classes - 1);
      for (std::size_t i = 0; i < n; ++i) {
        int leaf = labels[i];
        if (stray(rng)) leaf = (leaf + other(rng)) % classes;
        leaves[static_cast<std::size_t>(leaf)].push_back(i);
      }
      double weighted = 0;
      bool pure = true;
      for (const auto& l : leaves) {
        std::vector<std::size_t> count(static_cast<std::size_t>(classes));
        for (std::size_t i : l) ++count[static_cast<std::size_t>(labels[i])];
        const double purity = static_cast<double>(*std::max_element(count.begin(), count.end())) /
                              static_cast<double>(l.size());
        pure = pure && purity >= 0.9;
        weighted += purity * static_cast<double>(l.size()) / static_cast<double>(n);
      }
      if (!pure) continue;
      fed::LeafAssignmentLog log;
      log.trees.push_back(tree_of(leaves));
      std::vector<std::size_t> rows(n);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      const auto k = sample_knowledge(labels, classes, 5, seed);
      const auto r = run_attack(log, rows, labels, k, classes);
      EXPECT_GE(r.accuracy, weighted - 0.05) << seed << " " << classes;
    }
  }
}

TEST(Attack, PureSupersetTreeNeverHurts) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 80;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2;
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    // Noisy trees of small leaves that lean towards one class.
    fed::LeafAssignmentLog log;
    for (int t = 0; t < 4; ++t) {
      std::vector<std::vector<std::size_t>> leaves(8);
      std::bernoulli_distribution stray(0.3);
      std::uniform_int_distribution<int> pick(0, 3);
      for (std::size_t i = 0; i < n; ++i) {
        const int side = stray(rng) ? 1 - labels[i] : labels[i];
        leaves[static_cast<std::size_t>(side * 4 + pick(rng))].push_back(i);
      }
      log.trees.push_back(tree_of(leaves));
    }
    const auto k = sample_knowledge(labels, 2, 5, seed);
    const double before = run_attack(log, rows, labels, k, 2).accuracy;
    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    log.trees.push_back(tree_of(by_class));
    const double after = run_attack(log, rows, labels, k, 2).accuracy;
    EXPECT_GE(after, before) << seed;
  }
}

TEST(Attack, ReportConfusionSumsToProbe) {
  fed::LeafAssignmentLog log;
  log.trees.push_back(tree_of({{0, 2, 4}, {1, 3, 5}}));
  const std::size_t rows[] = {0, 1, 2, 3, 4, 5};
  const int labels[] = {0, 1, 0, 1, 0, 1};
  AttackerKnowledge k{{{0}, {1}}};
  const auto r = run_attack(log, rows, labels, k, 2);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  std::size_t total = 0;
  for (const auto& row : r.confusion)
    for (std::size_t v : row) total += v;
  EXPECT_EQ(total, 6u);
  EXPECT_EQ(r.cluster_sizes, (std::vector<std::size_t>{3, 3}));
}
