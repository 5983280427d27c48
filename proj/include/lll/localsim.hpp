// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lll/classify.hpp"
#include "lll/randomness.hpp"
#include "lll/resampler.hpp"
#include "lll/witness.hpp"

namespace lll {

/// Per-node LOCAL termination rounds of the meta-algorithm.
///
/// Charging: one resampling step costs 2 rounds. Every node pays for
/// collecting its (R_max + 1)-neighbourhood twice over, 2 R_max + 2, plus
/// 2 phase1_steps for simulating the first phase. An insecure node then pays
/// 2 rounds for every phase-2 step its insecure component takes. In a
/// fallback run every node is charged through the last global step.
struct LocalRunReport {
  std::vector<std::uint32_t> rounds;
  double node_averaged = 0.0;
  std::uint32_t worst_case = 0;
  std::uint32_t secure_round = 0;
  double secure_round_constant = 0.0;  ///< secure_round / ell
  std::uint32_t phase1_steps = 0;
  std::size_t phase2_steps = 0;
  std::size_t global_steps = 0;
  double insecure_fraction = 0.0;
  bool e_good = true;
  bool fallback_used = false;
  bool terminated = true;
  bool matches_global = true;  ///< restricted output equals the global run
};

/// Mean of the rounds. The sum is exact in 64-bit integers; the single
/// division is the only rounding.
inline double node_averaged(std::span<const std::uint32_t> rounds) {
  if (rounds.empty()) return 0.0;
  std::uint64_t sum = 0;
  for (auto r : rounds) sum += r;
  return static_cast<double>(sum) / static_cast<double>(rounds.size());
}

inline double node_averaged(const LocalRunReport& r) { return node_averaged(r.rounds); }

struct MetaResult {
  CpsResult global;
  ClassificationAnalysis analysis;
  LocalRunReport report;
  std::vector<Value> final_assignment;
};

/// The meta-algorithm on an already sampled table.
template <ValueSource Source>
MetaResult run_meta(const Instance& inst, const Source& src, const NarrowParams& P, std::size_t max_steps) {
  MetaResult m;
  m.global = run_cps(inst, src, max_steps);
  m.analysis = analyze(inst, m.global.log, P);
  const auto& cls = m.analysis.classification;
  const auto& sub = m.analysis.subgraph;
  auto& rep = m.report;
  rep.phase1_steps = P.phase1_steps;
  rep.global_steps = m.global.log.total_steps();
  rep.e_good = max_occurring_tree_size(inst, m.global.log).e_good;
  rep.insecure_fraction = static_cast<double>(cls.insecure_nodes.size()) / inst.n();

  CpsState<Source> state(inst, src);
  while (state.any_satisfied() && state.steps_taken() < std::min<std::size_t>(P.phase1_steps, max_steps)) state.step();

  // Phase 2: only risky events may resample. Any other satisfied event means
  // the restricted run has left the global trajectory.
  std::vector<std::uint32_t> last_step(sub.components.size(), 0);
  auto secure_violation = [&] {
    for (EventId e : state.satisfied_set())
      if (!cls.is_risky(e)) return true;
    return false;
  };
  while (state.any_satisfied()) {
    if (secure_violation()) {
      rep.fallback_used = true;
      break;
    }
    if (state.steps_taken() >= max_steps) {
      rep.terminated = false;
      break;
    }
    const auto set = state.step(&cls.risky);
    ++rep.phase2_steps;
    for (EventId e : set) last_step[sub.component_of[e]] = static_cast<std::uint32_t>(state.steps_taken());
  }

  const std::uint32_t H = P.phase1_steps;
  rep.secure_round = 2 * P.R_max + 2 + 2 * H;
  rep.secure_round_constant = rep.secure_round / P.ell;
  rep.rounds.assign(inst.n(), rep.secure_round);
  if (rep.fallback_used || !rep.terminated) {
    const auto extra = rep.global_steps > H ? static_cast<std::uint32_t>(2 * (rep.global_steps - H)) : 0u;
    for (auto& r : rep.rounds) r += extra;
    m.final_assignment = m.global.final_assignment;
  } else {
    for (EventId v : sub.nodes) {
      const auto last = last_step[sub.component_of[v]];
      if (last > H) rep.rounds[v] += 2 * (last - H);
    }
    m.final_assignment = state.assignment();
  }
  rep.terminated = rep.terminated && m.global.log.terminated;
  rep.matches_global = rep.fallback_used ||
                       assignment_digest(state.assignment()) == assignment_digest(m.global.final_assignment);
  rep.node_averaged = node_averaged(rep.rounds);
  rep.worst_case = *std::max_element(rep.rounds.begin(), rep.rounds.end());
  return m;
}

inline MetaResult run_meta(const Instance& inst, std::uint64_t seed, const ParamOverrides& ov = {}) {
  const auto P = derive_params(inst, ov);
  const auto table = sample_table(inst, seed);
  return run_meta(inst, table, P, default_max_steps(inst));
}

/// round,node_count rows in increasing round order.
inline std::string round_histogram_csv(const LocalRunReport& r) {
  std::map<std::uint32_t, std::size_t> hist;
  for (auto x : r.rounds) ++hist[x];
  std::ostringstream os;
  os << "round,node_count\n";
  for (auto [round, count] : hist) os << round << ',' << count << '\n';
  return os.str();
}

inline nlohmann::ordered_json local_report(const MetaResult& m) {
  auto j = classification_report(m.analysis);
  const auto& r = m.report;
  j["local"] = {{"node_averaged", r.node_averaged},
                {"worst_case", r.worst_case},
                {"secure_round", r.secure_round},
                {"secure_round_constant", r.secure_round_constant},
                {"phase1_steps", r.phase1_steps},
                {"phase2_steps", r.phase2_steps},
                {"global_steps", r.global_steps},
                {"insecure_fraction", r.insecure_fraction},
                {"e_good", r.e_good},
                {"fallback_used", r.fallback_used},
                {"terminated", r.terminated},
                {"matches_global", r.matches_global},
                {"final_assignment_digest", hex64(assignment_digest(m.final_assignment))}};
  return j;
}

}  // namespace lll
