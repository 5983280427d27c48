// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lll/classify.hpp"
#include "lll/generators.hpp"
#include "oracles.hpp"

namespace lll {
namespace {

TEST(DeriveParams, ExplicitEpsilon) {
  const auto P = derive_params(1000000, 2, 0.01, {.eps = 0.05});
  const double L = std::log(1e6) / std::log(100.0);
  const double ell = std::log(L) / std::log(1.0 / 0.95);
  EXPECT_NEAR(P.log_n, 3.0, 1e-12);
  EXPECT_NEAR(P.ell, ell, 1e-12);
  EXPECT_NEAR(P.ell, 21.42, 0.005);
  EXPECT_DOUBLE_EQ(P.lambda, 40.0);
  EXPECT_EQ(P.size_threshold, static_cast<std::uint32_t>(std::ceil(40.0 * ell)));
  EXPECT_EQ(P.R_max, static_cast<std::uint32_t>(std::ceil(84.0 * ell)));
  EXPECT_EQ(P.phase1_steps, static_cast<std::uint32_t>(std::ceil(42.0 * ell)));
  EXPECT_EQ(P.ruling_alpha(), static_cast<std::uint32_t>(std::ceil(168.0 * ell)) + 5);
  EXPECT_EQ(P.ruling_beta() + 1, P.ruling_alpha());
  EXPECT_TRUE(P.eps_overridden);
  EXPECT_FALSE(P.ell_clamped);
}

TEST(DeriveParams, DefaultEpsilonFromDelta) {
  const auto P = derive_params(1000, 2, std::ldexp(1.0, -20));
  EXPECT_NEAR(P.delta, 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(P.eps, 0.099);
  EXPECT_TRUE(P.feasible);
  // Small delta puts the formula below the cap.
  const auto Q = derive_params(1000, 2, std::ldexp(1.0, -11));
  EXPECT_NEAR(Q.eps, 0.9 * 1.0 / (2.0 * 11.0), 1e-9);
  EXPECT_TRUE(Q.feasible);
}

TEST(DeriveParams, DeskProfile) {
  const auto P = derive_params(2000, 10, std::ldexp(1.0, -10));
  EXPECT_TRUE(P.trivially_local);
  EXPECT_FALSE(P.feasible);
  EXPECT_TRUE(P.ell_clamped);
  EXPECT_DOUBLE_EQ(P.ell, 1.0);
  EXPECT_EQ(P.size_threshold, 21u);
  EXPECT_EQ(P.R_max, 45u);
  EXPECT_EQ(P.phase1_steps, 23u);
}

TEST(DeriveParams, Rejections) {
  EXPECT_THROW(derive_params(100, 2, 0.1, {.eps = 0.5}), ValidationError);
  EXPECT_THROW(derive_params(100, 2, 0.1, {.eps = 0.0}), ValidationError);
  EXPECT_THROW(derive_params(100, 2, 0.1, {.eps = 0.1}), ValidationError);
  EXPECT_THROW(derive_params(100, 2, 0.1, {.ell = 0.0}), ValidationError);
  EXPECT_THROW(derive_params(100, 2, 1.0), ValidationError);
  EXPECT_THROW(derive_params(1, 2, 0.1), ValidationError);
  EXPECT_TRUE(derive_params(100, 1, 0.1).trivially_local);
}

TEST(DeriveParams, JsonCarriesFlags) {
  const auto j = to_json(derive_params(2000, 10, std::ldexp(1.0, -10)));
  EXPECT_EQ(j["R_max"], 45);
  EXPECT_EQ(j["trivially_local"], true);
  EXPECT_TRUE(to_json(derive_params(100, 1, 0.1))["delta"].is_null());
}

NarrowParams tiny_params(double ell) { return derive_params(100, 2, 0.25, {.eps = 0.09, .ell = ell}); }

TEST(ClassifyRisky, NeverResampledIsNotRisky) {
  auto inst = fixture::clause_path(5);
  ExecutionLog log;
  log.steps = {{1}, {2}};
  const auto c = classify_risky(inst, log, tiny_params(0.01));
  EXPECT_TRUE(c.risky_nodes.empty());
  EXPECT_TRUE(c.insecure_nodes.empty());
}

TEST(ClassifyRisky, SmallTreesAreNeverRiskyUnderDerivedParams) {
  auto inst = fixture::clause_path(5);
  ExecutionLog log;
  log.steps = {{1, 3}, {2}};
  const auto c = classify_risky(inst, log, derive_params(inst));
  EXPECT_TRUE(c.risky_nodes.empty());
}

// Eleven copies of event 2 stacked over one copy of its neighbour: size 12,
// one boundary node, so the tree is 0.09-narrow from R = 1 on.
ExecutionLog narrow_log() {
  ExecutionLog log;
  log.steps.push_back({1});
  for (int i = 0; i < 11; ++i) log.steps.push_back({2});
  return log;
}

TEST(ClassifyRisky, HandBuiltNarrowTree) {
  auto inst = fixture::clause_path(5);
  const auto log = narrow_log();
  const auto P = tiny_params(0.5);
  ASSERT_EQ(P.size_threshold, 12u);
  const auto c = classify_risky(inst, log, P);
  ASSERT_EQ(c.risky_nodes, (std::vector<EventId>{2}));
  ASSERT_EQ(c.certificates.size(), 1u);
  const auto& cert = c.certificates[0];
  EXPECT_EQ(cert.t, 12u);
  EXPECT_EQ(cert.R, 1u);
  EXPECT_EQ(cert.size, 12u);
  EXPECT_EQ(cert.boundary, 1u);
  EXPECT_TRUE(verify_certificate(inst.graph(), log, P, cert));
  EXPECT_EQ(c.insecure_nodes, (std::vector<EventId>{1, 2, 3}));
  // Truncating before the last copy leaves only 11 nodes.
  EXPECT_TRUE(classify_risky(inst, log, P, 11).risky_nodes.empty());
  // A tampered certificate fails verification.
  auto bad = cert;
  bad.boundary = 2;
  EXPECT_FALSE(verify_certificate(inst.graph(), log, P, bad));
}

TEST(InsecureSubgraph, Empty) {
  auto inst = fixture::clause_path(5);
  ExecutionLog log;
  const auto c = classify_risky(inst, log, tiny_params(0.5));
  const auto sub = insecure_subgraph(inst, c);
  EXPECT_TRUE(sub.nodes.empty());
  EXPECT_TRUE(sub.components.empty());
  EXPECT_EQ(sub.edge_count, 0u);
}

Classification with_risky(const Instance& inst, std::vector<EventId> risky) {
  Classification c;
  c.risky.assign(inst.n(), 0);
  for (EventId v : risky) c.risky[v] = 1;
  c.risky_nodes = std::move(risky);
  close_insecure(inst.graph(), c);
  return c;
}

TEST(InsecureSubgraph, RiskyNodeWithThreeNeighbours) {
  // Event 0 shares a variable with each of 1, 2, 3, which are pairwise disjoint.
  std::vector<Variable> vars;
  for (VarId x = 0; x < 6; ++x) vars.push_back(Variable::uniform(x, 2));
  std::vector<BadEvent> ev{BadEvent::clause(0, {0, 1, 2}, {0, 0, 0}), BadEvent::clause(1, {0, 3}, {0, 0}),
                           BadEvent::clause(2, {1, 4}, {0, 0}), BadEvent::clause(3, {2, 5}, {0, 0})};
  Instance inst(vars, ev);
  const auto sub = insecure_subgraph(inst, with_risky(inst, {0}));
  ASSERT_EQ(sub.components.size(), 1u);
  EXPECT_LE(sub.components[0].nodes.size(), 4u);
  EXPECT_EQ(sub.components[0].diameter, 2u);
  EXPECT_EQ(sub.edge_count, 3u);
}

TEST(InsecureSubgraph, ComponentsAndDiametersMatchOracle) {
  auto inst = fixture::clause_path(20);
  const auto sub = insecure_subgraph(inst, with_risky(inst, {2, 4, 10, 17}));
  const auto dist = oracle::all_pairs(inst.graph());
  ASSERT_EQ(sub.components.size(), 3u);
  std::size_t total = 0;
  for (std::uint32_t k = 0; k < sub.components.size(); ++k) {
    const auto& comp = sub.components[k];
    total += comp.nodes.size();
    unsigned diam = 0;
    for (EventId a : comp.nodes) {
      EXPECT_EQ(sub.component_of[a], k);
      for (EventId b : comp.nodes) diam = std::max(diam, dist[a][b]);
    }
    EXPECT_EQ(comp.diameter, diam);
    EXPECT_TRUE(is_connected_subset(inst.graph(), comp.nodes));
  }
  EXPECT_EQ(total, sub.nodes.size());
  EXPECT_EQ(sub.components[0].nodes, (std::vector<EventId>{1, 2, 3, 4, 5}));
}

TEST(RulingSet, Examples) {
  auto inst = fixture::clause_path(10);
  const auto& g = inst.graph();
  EXPECT_EQ(ruling_set(g, {4}, 5, 4), (std::vector<EventId>{4}));
  EXPECT_EQ(ruling_set(g, {0, 9}, 5, 4), (std::vector<EventId>{0, 9}));
  std::vector<EventId> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto rulers = ruling_set(g, all, 3, 2);
  EXPECT_EQ(rulers, (std::vector<EventId>{0, 3, 6, 9}));
  EXPECT_TRUE(verify_ruling_set(g, all, rulers, 3, 2));
  EXPECT_FALSE(verify_ruling_set(g, all, {0, 1, 4, 7}, 3, 2));
  EXPECT_FALSE(verify_ruling_set(g, all, {0}, 3, 2));
  EXPECT_TRUE(verify_ruling_set(g, {}, {}, 3, 2));
  EXPECT_THROW(ruling_set(g, all, 4, 2), ValidationError);
}

TEST(NetworkDecomposition, EdgelessContractedGraphUsesOneColour) {
  auto inst = fixture::clause_path(10);
  Classification c;
  c.insecure.assign(10, 0);
  c.insecure[0] = c.insecure[5] = 1;
  c.insecure_nodes = {0, 5};
  const auto sub = insecure_subgraph(inst, c);
  const auto dec = network_decomposition(inst.graph(), sub, ruling_set(inst.graph(), sub.nodes, 3, 2));
  EXPECT_EQ(dec.clusters.size(), 2u);
  EXPECT_EQ(dec.colors, 1u);
  EXPECT_TRUE(verify_decomposition(inst.graph(), sub, dec));
}

TEST(NetworkDecomposition, PathOfThreeClusters) {
  auto inst = fixture::clause_path(9);
  Classification c;
  c.insecure.assign(9, 1);
  for (EventId v = 0; v < 9; ++v) c.insecure_nodes.push_back(v);
  const auto sub = insecure_subgraph(inst, c);
  const auto rulers = ruling_set(inst.graph(), sub.nodes, 3, 2);
  ASSERT_EQ(rulers, (std::vector<EventId>{0, 3, 6}));
  const auto dec = network_decomposition(inst.graph(), sub, rulers);
  EXPECT_EQ(dec.clusters[0], (std::vector<EventId>{0, 1}));
  EXPECT_EQ(dec.clusters[1], (std::vector<EventId>{2, 3, 4}));
  EXPECT_EQ(dec.clusters[2], (std::vector<EventId>{5, 6, 7, 8}));
  EXPECT_LE(dec.colors, 2u);
  EXPECT_EQ(dec.max_cluster_diameter, 3u);
  EXPECT_TRUE(verify_decomposition(inst.graph(), sub, dec));
  auto broken = dec;
  broken.color_of_cluster = {0, 0, 0};
  EXPECT_FALSE(verify_decomposition(inst.graph(), sub, broken));
}

// Small overridden thresholds on a dense 3-SAT instance, so risky events occur.
TEST(Analyze, StressProfileInvariants) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = gen_ksat(2000, 3, 3, seed);
    const auto P = derive_params(inst, {.eps = 0.09, .ell = 0.25});
    const auto run = run_cps(inst, sample_table(inst, seed));
    const auto a = analyze(inst, run.log, P);
    const auto& c = a.classification;
    EXPECT_FALSE(c.risky_nodes.empty()) << seed;
    EXPECT_TRUE(a.certificates_valid);
    EXPECT_TRUE(a.ruling_set_valid);
    EXPECT_TRUE(a.decomposition_valid);
    for (const auto& cert : c.certificates) {
      EXPECT_LE(cert.R, P.R_max);
      EXPECT_GE(cert.size, P.size_threshold);
      EXPECT_TRUE(is_narrow(cert.size, cert.boundary, P.eps));
      const auto& s = run.log.at(cert.t);
      EXPECT_TRUE(std::binary_search(s.begin(), s.end(), cert.event));
    }
    for (EventId v = 0; v < inst.n(); ++v) {
      bool expect = c.is_risky(v);
      for (EventId u : inst.graph().neighbors(v)) expect = expect || c.is_risky(u);
      EXPECT_EQ(c.is_insecure(v), expect);
    }
    std::size_t total = 0;
    for (const auto& comp : a.subgraph.components) total += comp.nodes.size();
    EXPECT_EQ(total, c.insecure_nodes.size());
    const auto j = classification_report(a);
    EXPECT_EQ(j["risky_count"], c.risky_nodes.size());
    EXPECT_EQ(j["components"].size(), a.subgraph.components.size());
    EXPECT_EQ(j["decomposition"]["valid"], true);
  }
}

}  // namespace
}  // namespace lll
