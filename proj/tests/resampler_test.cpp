// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#include <gtest/gtest.h>

#include "lll/generators.hpp"
#include "lll/resampler.hpp"
#include "oracles.hpp"

namespace lll {
namespace {

TEST(SatisfiedEvents, AllZeroMonochromatic) {
  std::vector<Variable> vars;
  for (VarId x = 0; x < 4; ++x) vars.push_back(Variable::uniform(x, 2));
  Instance inst(vars, {BadEvent::monochromatic(0, {0, 1}), BadEvent::monochromatic(1, {1, 2}),
                       BadEvent::clause(2, {2, 3}, {1, 1})});
  oracle::ScriptedSource zeros{{{0}, {0}, {0}, {0}}};
  AssignmentView view(4, 0);
  EXPECT_EQ(satisfied_events(inst, view, zeros), (std::vector<EventId>{0, 1}));
  oracle::ScriptedSource none{{{0}, {1}, {0}, {0}}};
  EXPECT_TRUE(satisfied_events(inst, view, none).empty());
}

TEST(LocallyMinimal, SpecExamples) {
  // path 3 - 5 - 9 inside a 10-node graph
  std::vector<std::vector<EventId>> lists(10);
  lists[3] = {5};
  lists[5] = {9};
  DependencyGraph g(lists);
  const EventId chain[] = {3, 5, 9};
  EXPECT_EQ(locally_minimal(chain, g), std::vector<EventId>{3});
  const EventId indep[] = {3, 9};
  EXPECT_EQ(locally_minimal(indep, g), (std::vector<EventId>{3, 9}));
  EXPECT_TRUE(locally_minimal(std::span<const EventId>{}, g).empty());
}

TEST(RunCps, NoSatisfiedEventGivesEmptyLog) {
  Instance inst({Variable::uniform(0, 2)}, {BadEvent::clause(0, {0}, {0})});
  oracle::ScriptedSource src{{{1}}};
  auto r = run_cps(inst, src, 10);
  EXPECT_EQ(r.log.total_steps(), 0u);
  EXPECT_TRUE(r.log.terminated);
}

TEST(RunCps, SingleEventHandTrace) {
  Instance inst({Variable::uniform(0, 2)}, {BadEvent::clause(0, {0}, {0})});
  oracle::ScriptedSource src{{{0, 1}}};
  auto r = run_cps(inst, src, 10);
  ASSERT_EQ(r.log.total_steps(), 1u);
  EXPECT_EQ(r.log.at(1), std::vector<EventId>{0});
  EXPECT_TRUE(r.log.terminated);
  EXPECT_EQ(r.final_assignment, std::vector<Value>{1});
  EXPECT_EQ(r.log.resample_counts, std::vector<std::uint32_t>{1});
}

TEST(RunCps, NonTerminationIsFlagged) {
  Instance inst({Variable{0, 2, {1.0, 0.0}}}, {BadEvent::clause(0, {0}, {0})});
  auto table = sample_table(inst, 1, 4);
  auto r = run_cps(inst, table, 10);
  EXPECT_FALSE(r.log.terminated);
  EXPECT_EQ(r.log.total_steps(), 10u);
  EXPECT_THROW(run_cps(inst, table, 0), ValidationError);
}

TEST(RunCps, DefaultStepCapClamps) {
  Instance tiny({Variable::uniform(0, 2)}, {BadEvent::clause(0, {0}, {0})});
  EXPECT_EQ(default_max_steps(tiny), 64u);
  auto big = gen_ksat(2000, 3, 2, 1);
  EXPECT_EQ(default_max_steps(big), static_cast<std::size_t>(std::ceil(50 * big.log_inv_p_n())));
}

TEST(RunCps, MatchesFromScratchReference) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = gen_ksat(120, 3, 3, seed);
    auto table = sample_table(inst, seed * 31 + 7);
    auto r = run_cps(inst, table, 200);
    auto ref = oracle::reference_cps(inst, table, 200);
    EXPECT_EQ(r.log.steps, ref.steps);
    EXPECT_EQ(r.log.terminated, ref.terminated);
    EXPECT_EQ(r.log.resample_counts, ref.resample_counts);
  }
}

TEST(RunCps, IncrementalSatisfiedSetMatchesScratch) {
  auto inst = gen_hypergraph_coloring(150, 3, 3, 2, 4);
  auto table = sample_table(inst, 99);
  CpsState<RandomnessTable> state(inst, table);
  for (int s = 0; s < 100 && state.any_satisfied(); ++s) {
    EXPECT_EQ(state.satisfied_set(), satisfied_events(inst, state.view(), table));
    const auto sat = state.satisfied_set();
    EXPECT_EQ(state.resample_set(), locally_minimal(sat, inst.graph()));
    state.step();
  }
}

TEST(RunCps, LogInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = gen_ksat(300, 4, 4, seed);
    auto table = sample_table(inst, seed);
    auto r = run_cps(inst, table);
    const auto& g = inst.graph();
    AssignmentView view(inst.num_vars(), 0);
    for (std::size_t t = 1; t <= r.log.total_steps(); ++t) {
      const auto& S = r.log.at(t);
      const auto sat = satisfied_events(inst, view, table);
      std::vector<char> is_sat(inst.n(), 0);
      for (EventId e : sat) is_sat[e] = 1;
      for (EventId v : S) {
        EXPECT_TRUE(is_sat[v]) << "resampled but not satisfied";
        for (EventId u : g.neighbors(v)) {
          EXPECT_FALSE(std::binary_search(S.begin(), S.end(), u)) << "dependent events in one step";
          if (u < v) {
            EXPECT_FALSE(is_sat[u]) << "lower satisfied neighbor";
          }
        }
      }
      for (EventId v : S)
        for (VarId x : inst.event(v).vars) ++view[x];
      EXPECT_EQ(view, replay_view(inst, r.log, t));
      for (VarId x = 0; x < inst.num_vars(); x += 7) EXPECT_EQ(value_index_at(inst, r.log, x, t), view[x]);
    }
    if (r.log.terminated) {
      EXPECT_TRUE(satisfied_events(inst, r.final_view, table).empty());
      for (EventId e = 0; e < inst.n(); ++e) {
        std::vector<Value> vals;
        for (VarId x : inst.event(e).vars) vals.push_back(r.final_assignment[x]);
        EXPECT_FALSE(eval_event(inst.event(e), vals));
      }
    }
    EXPECT_EQ(r.final_view, r.log.resample_counts);
  }
}

TEST(RunCps, Deterministic) {
  auto inst = gen_ksat(500, 5, 3, 2);
  auto a = run_cps(inst, sample_table(inst, 17));
  auto b = run_cps(inst, sample_table(inst, 17));
  EXPECT_EQ(a.log.steps, b.log.steps);
  EXPECT_EQ(a.final_assignment, b.final_assignment);
  EXPECT_EQ(run_report(17, a).dump(), run_report(17, b).dump());
}

TEST(RunCps, TerminatesQuicklyOnBoundedOccurrenceKsat) {
  auto inst = gen_ksat(500, 8, 2, 2024);
  const double bound = 10.0 * inst.log_inv_p_n();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto r = run_cps(inst, sample_table(inst, seed));
    EXPECT_TRUE(r.log.terminated);
    EXPECT_LE(static_cast<double>(r.log.total_steps()), bound) << "seed " << seed;
  }
}

TEST(ValueIndexAt, Counting) {
  // variable 0 belongs to event 0 only; event 0 resampled at steps 2 and 5
  Instance inst({Variable::uniform(0, 2), Variable::uniform(1, 2)},
                {BadEvent::clause(0, {0}, {0}), BadEvent::clause(1, {1}, {0})});
  ExecutionLog log;
  log.steps = {{1}, {0}, {1}, {1}, {0}};
  EXPECT_EQ(value_index_at(inst, log, 0, 0), 0u);
  EXPECT_EQ(value_index_at(inst, log, 1, 0), 0u);
  EXPECT_EQ(value_index_at(inst, log, 0, 4), 1u);
  EXPECT_EQ(value_index_at(inst, log, 0, 5), 2u);
  EXPECT_EQ(value_index_at(inst, log, 1, 5), 3u);
  EXPECT_THROW(value_index_at(inst, log, 0, 6), ValidationError);
}

TEST(RunReport, FieldsAndDigest) {
  auto inst = gen_ksat(200, 4, 3, 5);
  auto r = run_cps(inst, sample_table(inst, 5));
  auto rep = run_report(5, r);
  EXPECT_EQ(rep["seed"], 5);
  EXPECT_EQ(rep["T"], r.log.total_steps());
  EXPECT_EQ(rep["terminated"], r.log.terminated);
  EXPECT_EQ(rep["resample_total"], r.log.resample_total());
  EXPECT_EQ(rep["per_step_sizes"].size(), r.log.total_steps());
  EXPECT_EQ(rep["final_assignment_digest"].get<std::string>().size(), 18u);
  const Value a[] = {0, 1, 0};
  const Value b[] = {0, 0, 1};
  EXPECT_NE(assignment_digest(a), assignment_digest(b));
}

}  // namespace
}  // namespace lll
