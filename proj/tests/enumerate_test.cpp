// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#include <gtest/gtest.h>

#include <set>

#include "lll/enumerate.hpp"
#include "lll/randomness.hpp"
#include "oracles.hpp"

namespace lll {
namespace {

// Random simple graph on n nodes with every degree at most cap.
DependencyGraph random_graph(EventId n, std::uint32_t cap, std::uint64_t seed) {
  SplitMix rng(seed);
  std::vector<std::vector<EventId>> adj(n);
  for (int attempt = 0; attempt < 4 * static_cast<int>(n); ++attempt) {
    const auto u = static_cast<EventId>(rng.below(n));
    const auto v = static_cast<EventId>(rng.below(n));
    if (u == v || adj[u].size() >= cap || adj[v].size() >= cap) continue;
    if (std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end()) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return DependencyGraph(adj);
}

std::string canon(const AbstractTree& t, std::size_t i = 0) {
  std::vector<std::string> parts;
  for (std::size_t c = 1; c < t.size(); ++c)
    if (t.parent[c] == static_cast<int>(i)) parts.push_back(canon(t, c));
  std::sort(parts.begin(), parts.end());
  std::string s = "(" + std::to_string(t.labels[i]);
  for (auto& p : parts) s += p;
  return s + ")";
}

TEST(EnumerateTrees, SizeOneIsJustTheRoot) {
  DependencyGraph g({{1}, {}});
  auto trees = enumerate_trees(g, 0, 1);
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_EQ(trees[0].labels, std::vector<EventId>{0});
}

TEST(EnumerateTrees, SingleEdgeAgreesWithBruteForce) {
  DependencyGraph g({{1}, {}});
  TreeEnumerator en(g, 3);
  const auto count = en.count(0);
  EXPECT_EQ(count, oracle::brute_tree_count(g, 0, 3));
  // sizes 1, 2, 3 contribute 1 + 2 + (3 stars + 4 chains)
  EXPECT_EQ(count, 10u);
  EXPECT_LT(static_cast<double>(count), tree_count_bound(1, 3));
}

TEST(EnumerateTrees, EachTreeOnceAndStructurallyValid) {
  auto g = random_graph(10, 3, 42);
  const auto dist = oracle::all_pairs(g);
  for (EventId v = 0; v < g.size(); ++v) {
    std::set<std::string> seen;
    TreeEnumerator(g, 4).for_each(v, [&](const AbstractTree& t) {
      EXPECT_EQ(t.labels.front(), v);
      EXPECT_EQ(t.parent.front(), -1);
      for (std::size_t i = 1; i < t.size(); ++i) {
        ASSERT_GE(t.parent[i], 0);
        ASSERT_LT(t.parent[i], static_cast<int>(i));
        EXPECT_LE(dist[t.labels[i]][t.labels[t.parent[i]]], 2u);
      }
      EXPECT_TRUE(seen.insert(canon(t)).second) << "duplicate " << canon(t);
    });
  }
}

TEST(EnumerateTrees, CountBelowBoundAndDualAgreement) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = random_graph(9 + seed % 4, 3, seed);
    ASSERT_LE(g.max_degree(), 3u);
    const auto d = std::max<std::uint32_t>(g.max_degree(), 1);
    for (EventId v = 0; v < g.size(); ++v) {
      for (std::size_t k = 1; k <= 4; ++k) {
        const auto count = TreeEnumerator(g, k).count(v);
        EXPECT_LT(static_cast<double>(count), tree_count_bound(d, k));
        EXPECT_EQ(count, oracle::brute_tree_count(g, v, k)) << "seed " << seed << " v " << v << " k " << k;
      }
    }
  }
}

TEST(EnumerateTrees, RegimeLimits) {
  DependencyGraph g({{1}, {}});
  EXPECT_THROW(TreeEnumerator(g, 9), RegimeError);
  std::vector<std::vector<EventId>> star(6);
  star[0] = {1, 2, 3, 4, 5};
  EXPECT_THROW(TreeEnumerator(DependencyGraph(star), 3), RegimeError);
  EXPECT_NO_THROW(TreeEnumerator(g, 8));
}

TEST(TreeCountBound, Formula) {
  EXPECT_DOUBLE_EQ(tree_count_bound(2, 3), 8000.0);
  EXPECT_DOUBLE_EQ(tree_count_bound(3, 1), 45.0);
}

}  // namespace
}  // namespace lll
