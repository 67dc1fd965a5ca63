#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "cmosb/data.hpp"
#include "cmosb/error.hpp"
#include "cmosb/gbdt.hpp"

using namespace cmosb;

TEST(Synthetic, Synthetic1Shape) {
  const auto ds = data::generate_synthetic(2000, 5, 5, 2, 1.0, 7);
  EXPECT_EQ(ds.rows(), 2000u);
  EXPECT_EQ(ds.cols(), 10u);
  EXPECT_EQ(ds.class_count, 2);
  EXPECT_EQ(ds.labels.size(), ds.rows());
}

TEST(Synthetic, Synthetic2Shape) {
  const auto ds = data::generate_synthetic(10000, 5, 5, 10, 1.0, 7);
  EXPECT_EQ(ds.rows(), 10000u);
  EXPECT_EQ(ds.cols(), 10u);
  EXPECT_EQ(ds.class_count, 10);
}

TEST(Synthetic, Deterministic) {
  const auto a = data::generate_synthetic(300, 3, 4, 3, 1.5, 11);
  const auto b = data::generate_synthetic(300, 3, 4, 3, 1.5, 11);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  const auto c = data::generate_synthetic(300, 3, 4, 3, 1.5, 12);
  EXPECT_NE(a.features, c.features);
}

TEST(Synthetic, LabelsInRangeAndBalanced) {
  for (int classes : {2, 3, 7}) {
    const auto ds = data::generate_synthetic(101, 2, 3, classes, 1.0, 3);
    std::vector<int> count(classes, 0);
    for (int y : ds.labels) {
      ASSERT_GE(y, 0);
      ASSERT_LT(y, classes);
      ++count[y];
    }
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    EXPECT_LE(*hi - *lo, 1);
  }
}

TEST(Synthetic, NoConstantColumn) {
  const auto ds = data::generate_synthetic(40, 3, 3, 2, 1.0, 5);
  for (std::size_t c = 0; c < ds.cols(); ++c) {
    const auto col = ds.features.column(c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    EXPECT_LT(*lo, *hi) << "column " << c;
  }
}

TEST(Synthetic, RejectsBadArguments) {
  EXPECT_THROW(data::generate_synthetic(100, 0, 5, 2, 1.0, 1), ParameterError);
  EXPECT_THROW(data::generate_synthetic(100, 5, 0, 2, 1.0, 1), ParameterError);
  EXPECT_THROW(data::generate_synthetic(100, 5, 5, 1, 1.0, 1), ParameterError);
  EXPECT_THROW(data::generate_synthetic(3, 5, 5, 2, 1.0, 1), ParameterError);
  EXPECT_THROW(data::generate_synthetic(100, 5, 5, 2, 0.0, 1), ParameterError);
}

namespace {

double depth8_accuracy(double sep, std::uint64_t seed) {
  const auto ds = data::generate_synthetic(2000, 5, 5, 2, sep, seed);
  const auto split = data::train_test_split(ds, seed + 1);
  const auto edges = gbdt::quantile_binning(ds.features, split.train_rows);
  const gbdt::BinnedMatrix bins(ds.features, edges);
  std::vector<std::size_t> cols(ds.cols());
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  const auto grads = gbdt::compute_gradients(ds.labels, Matrix(ds.rows(), 1), gbdt::LossKind::Logistic);
  const auto tree = gbdt::train_local_tree(bins, cols, split.train_rows, grads[0], 8, {});
  std::size_t hit = 0;
  for (std::size_t r : split.test_rows) {
    const double w = tree.nodes[tree.leaf_for_binned(bins, r)].weight;
    hit += (w > 0 ? 1 : 0) == ds.labels[r];
  }
  return static_cast<double>(hit) / split.test_rows.size();
}

}  // namespace

TEST(Synthetic, SeparabilityKnobIsMonotone) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const double a = depth8_accuracy(0.5, seed);
    const double b = depth8_accuracy(1.0, seed);
    const double c = depth8_accuracy(2.0, seed);
    EXPECT_LT(a, b) << "seed " << seed;
    EXPECT_LT(b, c) << "seed " << seed;
  }
}

TEST(Csv, MinimalParse) {
  std::istringstream in("a,b,label\n1,2,0\n3,4,1\n5,6,0\n");
  const auto ds = data::read_csv(in, std::string("label"), 2);
  EXPECT_EQ(ds.rows(), 3u);
  EXPECT_EQ(ds.cols(), 2u);
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 1, 0}));
  EXPECT_DOUBLE_EQ(ds.features(1, 1), 4.0);
}

TEST(Csv, LabelByIndexAndReencoding) {
  std::istringstream in("y,a,b\n7,1,2\n-3,3,4\n7,5,6\n");
  const auto ds = data::read_csv(in, std::size_t{0}, 0);
  EXPECT_EQ(ds.labels, (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(ds.column_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(ds.features(0, 0), 1.0);
}

TEST(Csv, Errors) {
  {
    std::istringstream in("a,b\n1,2\n");
    EXPECT_THROW(data::read_csv(in, std::string("label"), 0), IngestionError);
  }
  {
    std::istringstream in("a,label\n1,0\nx,1\n");
    try {
      data::read_csv(in, std::string("label"), 0);
      FAIL();
    } catch (const IngestionError& e) {
      EXPECT_NE(std::string(e.what()).find("row"), std::string::npos);
    }
  }
  {
    std::istringstream in("a,label\n1,0\n2,1\n");
    EXPECT_THROW(data::read_csv(in, std::string("label"), 3), IngestionError);
  }
  {
    std::istringstream in("a,label\n1,0\n,1\n");
    EXPECT_THROW(data::read_csv(in, std::string("label"), 0), IngestionError);
  }
}

TEST(Csv, WriteReadRoundTrip) {
  const auto ds = data::generate_synthetic(50, 2, 2, 3, 1.0, 9);
  std::stringstream s;
  data::write_csv(ds, s);
  const auto back = data::read_csv(s, std::string("label"), 3);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.features, ds.features);
}

TEST(Partition, ColumnOrder) {
  const auto p = data::vertical_partition(10, 5, 1);
  EXPECT_EQ(p.active_columns, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(p.passive_columns, (std::vector<std::size_t>{5, 6, 7, 8, 9}));
  const auto q = data::vertical_partition(25, 12, 1);
  EXPECT_EQ(q.active_columns.size(), 12u);
  EXPECT_EQ(q.passive_columns.size(), 13u);
}

TEST(Partition, RangeErrors) {
  EXPECT_THROW(data::vertical_partition(10, 10, 1), ParameterError);
  EXPECT_THROW(data::vertical_partition(10, 0, 1), ParameterError);
}

TEST(Partition, CompletenessProperty) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t total = 2 + seed % 17;
    const std::size_t active = 1 + seed % (total - 1);
    for (bool shuffled : {false, true}) {
      const auto p = data::vertical_partition(total, active, seed, shuffled);
      ASSERT_FALSE(p.active_columns.empty());
      ASSERT_FALSE(p.passive_columns.empty());
      std::vector<std::size_t> all = p.active_columns;
      all.insert(all.end(), p.passive_columns.begin(), p.passive_columns.end());
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> want(total);
      std::iota(want.begin(), want.end(), std::size_t{0});
      EXPECT_EQ(all, want);
    }
  }
}

TEST(Split, Sizes) {
  const auto s = data::train_test_split(2000, 4);
  EXPECT_EQ(s.train_rows.size(), 2000u * 2 / 3);
  EXPECT_EQ(s.train_rows.size(), 1333u);
  EXPECT_EQ(s.test_rows.size(), 667u);
  const auto t = data::train_test_split(3, 4);
  EXPECT_EQ(t.train_rows.size(), 2u);
  EXPECT_EQ(t.test_rows.size(), 1u);
  EXPECT_THROW(data::train_test_split(0, 1), ParameterError);
}

TEST(Split, DisjointCoverAndDeterministic) {
  const auto a = data::train_test_split(517, 8);
  const auto b = data::train_test_split(517, 8);
  EXPECT_EQ(a.train_rows, b.train_rows);
  EXPECT_EQ(a.test_rows, b.test_rows);
  std::set<std::size_t> all(a.train_rows.begin(), a.train_rows.end());
  all.insert(a.test_rows.begin(), a.test_rows.end());
  EXPECT_EQ(all.size(), 517u);
  EXPECT_EQ(*all.rbegin(), 516u);
}

TEST(Balanced, ExactCountsPerClass) {
  const auto ds = data::generate_synthetic(400, 2, 2, 2, 1.0, 1);
  const auto idx = data::sample_balanced(ds.labels, 50, 3);
  EXPECT_EQ(idx.size(), 100u);
  std::vector<int> count(2, 0);
  for (auto i : idx) ++count[ds.labels[i]];
  EXPECT_EQ(count, (std::vector<int>{50, 50}));
  EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), idx.size());
  EXPECT_EQ(idx, data::sample_balanced(ds.labels, 50, 3));

  const auto ten = data::generate_synthetic(1000, 2, 2, 10, 1.0, 1);
  EXPECT_EQ(data::sample_balanced(ten.labels, 20, 3).size(), 200u);
}

TEST(Balanced, ShortClassIsNamed) {
  const std::vector<int> labels{0, 0, 0, 1};
  try {
    data::sample_balanced(labels, 2, 1);
    FAIL();
  } catch (const SamplingError& e) {
    EXPECT_NE(std::string(e.what()).find("class 1"), std::string::npos);
  }
}
