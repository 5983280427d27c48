// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lll/montecarlo.hpp"

namespace lll {
namespace {

AbstractTree tree_of(std::vector<EventId> labels, std::vector<std::int32_t> parent) {
  return AbstractTree{std::move(labels), std::move(parent)};
}

TEST(MakeTarget, ComputesDepthAndDistance) {
  auto inst = fixture::clause_ring();
  auto t = make_target(inst.graph(), tree_of({3, 4, 5}, {-1, 0, 1}));
  EXPECT_EQ(t.depth(), 2u);
  EXPECT_EQ(t.g_radius(), 2u);
  EXPECT_EQ(t.boundary_count(), 1u);
  EXPECT_EQ(t.canonical_shape(), "(3(4(5)))");
}

TEST(TreeProbabilityBound, OccurringAndPossible) {
  auto inst = fixture::clause_ring();
  auto t = make_target(inst.graph(), tree_of({3, 4}, {-1, 0}));
  EXPECT_DOUBLE_EQ(tree_probability_bound(inst, {t, false}), 1.0 / 64);
  EXPECT_DOUBLE_EQ(tree_probability_bound(inst, {t, true}), 1.0 / 8);
}

TEST(McOccurrence, SingleNodeTreeIsInitialViolation) {
  auto inst = fixture::clause_ring();
  auto t = make_target(inst.graph(), tree_of({2}, {-1}));
  auto est = mc_occurrence_probability(inst, t, 40000, 1);
  // Occurrence as a size-1 tree means v is in S_1, which needs v violated at the start.
  EXPECT_TRUE(est.within_bound()) << est.frequency();
  EXPECT_GT(est.frequency(), 0.0);
  EXPECT_LE(est.frequency(), inst.p() + 4 * est.stderr_());
}

TEST(McOccurrence, SizeTwoTrees) {
  auto inst = fixture::clause_ring();
  const std::vector<AbstractTree> shapes{tree_of({2, 2}, {-1, 0}), tree_of({2, 3}, {-1, 0}),
                                         tree_of({2, 4}, {-1, 0}), tree_of({5, 4}, {-1, 0})};
  std::vector<TreeTarget> targets;
  for (const auto& s : shapes) targets.push_back({make_target(inst.graph(), s), false});
  for (const auto& s : shapes) targets.push_back({make_target(inst.graph(), s), true});
  auto est = mc_tree_frequencies(inst, targets, 40000, 2);
  for (std::size_t k = 0; k < targets.size(); ++k)
    EXPECT_TRUE(est[k].within_bound()) << k << ": " << est[k].frequency() << " vs " << est[k].bound;
}

TEST(McOccurrence, DeterministicInSeed) {
  auto inst = fixture::clause_ring();
  const TreeTarget targets[] = {{make_target(inst.graph(), tree_of({1, 2}, {-1, 0})), false}};
  auto a = mc_tree_frequencies(inst, targets, 5000, 9);
  auto b = mc_tree_frequencies(inst, targets, 5000, 9);
  EXPECT_EQ(a[0].hits, b[0].hits);
}

TEST(McOccurrence, LargeTreesAreRejected) {
  auto inst = fixture::clause_ring();
  auto t = make_target(inst.graph(), tree_of({1, 2, 3, 4}, {-1, 0, 1, 2}));
  EXPECT_THROW(mc_occurrence_probability(inst, t, 10, 0), RegimeError);
}

TEST(OutsideVariables, RingCounts) {
  auto inst = fixture::clause_ring();
  auto single = make_target(inst.graph(), tree_of({0}, {-1}));
  EXPECT_EQ(outside_variables(inst, single).size(), 9u);
  auto r1 = make_target(inst.graph(), tree_of({0, 1}, {-1, 0}));
  EXPECT_EQ(outside_variables(inst, r1).size(), 5u);
  auto r2 = make_target(inst.graph(), tree_of({0, 2}, {-1, 0}));
  EXPECT_EQ(outside_variables(inst, r2).size(), 1u);
  for (VarId x : outside_variables(inst, r1))
    for (EventId e : inst.events_of(x)) EXPECT_GT(distance(inst.graph(), 0, e), 2u);
}

TEST(AdversarialScan, PossibleTreesStayWithinBound) {
  auto inst = fixture::clause_ring();
  const TreeTarget target{make_target(inst.graph(), tree_of({4, 5}, {-1, 0})), true};
  auto scan = adversarial_scan(inst, target, 4000, 3);
  EXPECT_EQ(scan.settings, 32u);
  EXPECT_TRUE(scan.all_within) << scan.worst.frequency();
}

TEST(McEstimate, Arithmetic) {
  McEstimate e{25, 100, 0.2};
  EXPECT_DOUBLE_EQ(e.frequency(), 0.25);
  EXPECT_NEAR(e.stderr_(), std::sqrt(0.25 * 0.75 / 100), 1e-15);
  EXPECT_TRUE(e.within_bound());
  McEstimate bad{50, 100, 0.2};
  EXPECT_FALSE(bad.within_bound());
}

}  // namespace
}  // namespace lll
