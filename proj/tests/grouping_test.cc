#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "srgc/bench.h"
#include "srgc/grouping.h"
#include "srgc/spectral.h"
#include "srgc/transform.h"
#include "grouping_oracle.h"
#include "test_util.h"

namespace srgc {
namespace {

PairWeights FromValues(int m, const std::vector<double>& values) {
  PairWeights w(m);
  size_t k = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) w.at(i, j) = values[k++];
  return w;
}

TEST(PairCountTest, TableValues) {
  EXPECT_EQ(PairCount(1252), 783126u);
  EXPECT_EQ(PairCount(2723), 3706003u);
  EXPECT_EQ(PairCount(1), 0u);
  EXPECT_EQ(PairCount(0), 0u);
}

TEST(PairwiseMseTest, IdenticalVectorsAreZero) {
  const PairWeights w = PairwiseMse({{1, 2, 3}, {1, 2, 3}, {1, 2, 5}});
  EXPECT_EQ(w.at(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(w.at(0, 2), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(w.at(2, 1), 4.0 / 3.0);
}

TEST(PairwiseMseTest, PackedIndexCoversTriangle) {
  PairWeights w(7);
  int k = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) w.at(i, j) = ++k;
  for (int i = 0, k2 = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) EXPECT_EQ(w.values()[k2++], w.at(j, i));
}

TEST(ThresholdTest, Examples) {
  // {1,2,3,6,7,12}: bins [0,5)=3, [5,10)=2, [10,15)=1.
  EXPECT_EQ(SelectThreshold(FromValues(4, {1, 2, 3, 6, 7, 12}), 5), 5);
  EXPECT_EQ(SelectThreshold(FromValues(3, {0, 0, 0}), 5), 5);
  // Counts (4, 2, 4): the first maximum wins.
  EXPECT_EQ(SelectThreshold(FromValues(5, {1, 1, 1, 1, 6, 6, 11, 11, 11, 11}), 5), 5);
  // Counts (1, 3): the second bin wins.
  EXPECT_EQ(SelectThreshold(FromValues(3, {1, 6, 7}), 5), 10);
}

TEST(OneLevelTest, Examples) {
  const PairWeights none = FromValues(3, {9, 9, 9});
  EXPECT_TRUE(OneLevelGroups(none, 5).empty());
  // A=0, B=1, C=2. (A,B) and (B,C) under, (A,C) over.
  const PairWeights chain = FromValues(3, {1, 9, 1});
  EXPECT_EQ(OneLevelGroups(chain, 5),
            (std::vector<std::vector<int>>{{0, 1}, {0, 1, 2}, {1, 2}}));
  const PairWeights all = FromValues(3, {1, 1, 1});
  EXPECT_EQ(OneLevelGroups(all, 5),
            (std::vector<std::vector<int>>{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}));
}

TEST(MergeTest, Examples) {
  EXPECT_EQ(MergeGroups({{0, 1}, {1, 2}, {3, 4}}),
            (std::vector<std::vector<int>>{{0, 1, 2}, {3, 4}}));
  EXPECT_EQ(MergeGroups({{0, 3}, {1, 2}}), (std::vector<std::vector<int>>{{0, 3}, {1, 2}}));
  std::vector<std::vector<int>> chain;
  for (int i = 1; i < 10; ++i) chain.push_back({i, i + 1});
  std::vector<int> all(10);
  std::iota(all.begin(), all.end(), 1);
  EXPECT_EQ(MergeGroups(chain), (std::vector<std::vector<int>>{all}));
}

TEST(MergeTest, PermutationInvariant) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<int>> sets;
    for (int k = 0; k < 6; ++k) {
      std::vector<int> s{int(rng() % 15), int(rng() % 15)};
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      sets.push_back(s);
    }
    auto shuffled = sets;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(MergeGroups(sets), MergeGroups(shuffled));
  }
}

TEST(MainTest, Examples) {
  const std::vector<std::vector<double>> s{{1, 2}, {3, 4}, {10, 20}};
  const std::vector<int> g{0, 1, 2};
  EXPECT_EQ(SelectMain(g, s), 1);
  const std::vector<std::vector<double>> twins{{5, 5}, {5, 5}};
  EXPECT_EQ(SelectMain(std::vector<int>{0, 1}, twins), 0);
  const std::vector<std::vector<double>> exact{{0, 0}, {2, 2}, {4, 4}, {9, 9}};
  EXPECT_EQ(SelectMain(std::vector<int>{0, 1, 2, 3}, exact), 1);
}

TEST(PredictTest, SameBasisIsExact) {
  std::mt19937 rng(4);
  const EigenBasis b =
      Eigendecompose(BuildLaplacian(testing::RandomConnectedGraph(rng, 8, 0.3)));
  std::vector<double> f(8);
  for (double& x : f) x = double(rng() % 256);
  const Prediction p = PredictAndResidual(b, Gft(b, f), f, 255);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(p.predicted[i], int64_t(f[i]));
    EXPECT_EQ(p.residual[i], 0);
  }
}

TEST(PredictTest, ConstantSignal) {
  std::mt19937 rng(5);
  const EigenBasis a =
      Eigendecompose(BuildLaplacian(testing::RandomConnectedGraph(rng, 10, 0.2)));
  const EigenBasis b =
      Eigendecompose(BuildLaplacian(testing::RandomConnectedGraph(rng, 10, 0.2)));
  const std::vector<double> f(10, 42.0);
  const Prediction p = PredictAndResidual(a, Gft(b, f), f, 255);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(p.predicted[i], 42);
    EXPECT_EQ(p.residual[i], 0);
  }
}

TEST(PredictTest, ResidualIdentityCrossBasis) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const EigenBasis a =
        Eigendecompose(BuildLaplacian(testing::RandomConnectedGraph(rng, 8, 0.3)));
    const EigenBasis b =
        Eigendecompose(BuildLaplacian(testing::RandomConnectedGraph(rng, 8, 0.3)));
    std::vector<double> f(8);
    for (double& x : f) x = double(rng() % 256);
    const auto coeffs = Dequantize(Quantize(Gft(b, f), 8.0));
    const Prediction p = PredictAndResidual(a, coeffs, f, 255);
    for (int i = 0; i < 8; ++i) {
      EXPECT_EQ(p.predicted[i] + p.residual[i], int64_t(f[i]));
      EXPECT_GE(p.predicted[i], 0);
      EXPECT_LE(p.predicted[i], 255);
    }
    EXPECT_EQ(PredictSamples(a, coeffs, 255), p.predicted);
  }
}

TEST(RunGroupingTest, FourIdenticalPlusOneDistant) {
  std::mt19937 rng(7);
  const auto base = testing::RandomVector(rng, 12, -50, 50);
  std::vector<std::vector<double>> c(4, base);
  c.push_back(testing::RandomVector(rng, 12, 500, 900));
  const GroupSet gs = RunGrouping(c, c, 5.0);
  ASSERT_EQ(gs.groups.size(), 1u);
  EXPECT_EQ(gs.groups[0].members, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(gs.groups[0].main, 0);
  EXPECT_EQ(gs.ungrouped, (std::vector<int>{4}));
  const auto oracle = testing::BruteForceGrouping(c, c, 5.0);
  EXPECT_EQ(oracle.groups, (std::vector<std::vector<int>>{{0, 1, 2, 3}}));
}

TEST(RunGroupingTest, FewerThanTwo) {
  const GroupSet one = RunGrouping({{1, 2}}, {{1, 2}}, 5.0);
  EXPECT_TRUE(one.groups.empty());
  EXPECT_EQ(one.ungrouped, (std::vector<int>{0}));
  EXPECT_EQ(ComputeGroupingRatios(0, 1, 1).coarsened, 0.0);
  EXPECT_TRUE(RunGrouping({}, {}, 5.0).groups.empty());
}

TEST(RunGroupingTest, MatchesOracleAndInvariants) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 2 + int(rng() % 10);
    const int dim = 1 + int(rng() % 6);
    std::vector<std::vector<double>> c, s;
    for (int i = 0; i < m; ++i) {
      c.push_back(testing::RandomVector(rng, dim, 0, 6));
      s.push_back(testing::RandomVector(rng, dim + 2, 0, 255));
    }
    const GroupSet gs = RunGrouping(c, s, 2.0);
    const auto oracle = testing::BruteForceGrouping(c, s, 2.0);
    EXPECT_EQ(gs.threshold, oracle.threshold);
    ASSERT_EQ(gs.groups.size(), oracle.groups.size());
    for (size_t g = 0; g < gs.groups.size(); ++g) {
      EXPECT_EQ(gs.groups[g].members, oracle.groups[g]);
      EXPECT_EQ(gs.groups[g].main, oracle.mains[g]);
    }
    EXPECT_EQ(gs.ungrouped, oracle.ungrouped);
    // Partition property.
    std::vector<int> seen(m, 0);
    for (const auto& g : gs.groups)
      for (int v : g.members) ++seen[v];
    for (int v : gs.ungrouped) ++seen[v];
    for (int v = 0; v < m; ++v) EXPECT_EQ(seen[v], 1);
    EXPECT_LE(gs.groups.size(), gs.one_level_groups);
    // Each one-level set is anchored on a vertex of some sub-threshold pair.
    EXPECT_LE(gs.one_level_groups, 2 * gs.pairs_under_threshold);
    EXPECT_EQ(gs.pair_count, PairCount(m));
  }
}

TEST(RunGroupingTest, ThresholdMonotonicity) {
  std::mt19937 rng(9);
  std::vector<std::vector<double>> c;
  for (int i = 0; i < 15; ++i) c.push_back(testing::RandomVector(rng, 4, 0, 10));
  const PairWeights w = PairwiseMse(c);
  size_t last = 0;
  for (double t = 0; t < 60; t += 0.5) {
    size_t grouped = 0;
    for (const auto& g : MergeGroups(OneLevelGroups(w, t))) grouped += g.size();
    EXPECT_GE(grouped, last);
    last = grouped;
  }
  EXPECT_EQ(last, 15u);
}

TEST(RunGroupingTest, ThreadCountIrrelevant) {
  std::mt19937 rng(10);
  std::vector<std::vector<double>> c;
  for (int i = 0; i < 40; ++i) c.push_back(testing::RandomVector(rng, 8, 0, 5));
  const GroupSet a = RunGrouping(c, c, 1.0, 1);
  const GroupSet b = RunGrouping(c, c, 1.0, 4);
  EXPECT_EQ(a.groups, b.groups);
  EXPECT_EQ(a.ungrouped, b.ungrouped);
}

}  // namespace
}  // namespace srgc
