// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lll/enumerate.hpp"
#include "lll/randomness.hpp"
#include "lll/resampler.hpp"
#include "lll/witness.hpp"

namespace lll {

inline constexpr std::size_t kMaxMonteCarloTreeSize = 3;
inline constexpr std::size_t kMaxAdversarialSettings = 4096;

/// A tree to look for in sampled executions. With `possible` set the target
/// is matched against the R-possible tree, R = its own G-radius.
struct TreeTarget {
  WitnessTree tree;
  bool possible = false;
};

struct McEstimate {
  std::size_t hits = 0;
  std::size_t trials = 0;
  double bound = 0.0;  ///< p^|T| (occurring) or p^(|T| - |boundary|) (possible)

  [[nodiscard]] double frequency() const { return trials ? static_cast<double>(hits) / trials : 0.0; }
  [[nodiscard]] double stderr_() const {
    const double f = frequency();
    return trials ? std::sqrt(f * (1.0 - f) / trials) : 0.0;
  }
  /// frequency <= bound + 4 standard errors
  [[nodiscard]] bool within_bound() const { return frequency() <= bound + 4.0 * stderr_(); }
};

/// Materializes an abstract labelled tree as a witness tree (steps zeroed),
/// computing tree depths and G-distances to the root event.
inline WitnessTree make_target(const DependencyGraph& g, const AbstractTree& t) {
  Bfs bfs(g);
  bfs.run(t.labels.front());
  std::vector<TreeNode> nodes(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    nodes[i].event = t.labels[i];
    nodes[i].parent = t.parent[i];
    nodes[i].depth = t.parent[i] < 0 ? 0 : nodes[t.parent[i]].depth + 1;
    nodes[i].g_dist = bfs.distance(t.labels[i]);
  }
  return WitnessTree(std::move(nodes));
}

inline double tree_probability_bound(const Instance& inst, const TreeTarget& target) {
  const auto exponent = target.possible ? target.tree.size() - target.tree.boundary_count() : target.tree.size();
  return std::pow(inst.p(), static_cast<double>(exponent));
}

namespace detail {

template <ValueSource Source>
void count_matches(const Instance& inst, const Source& src, std::span<const TreeTarget> targets,
                   const std::vector<std::string>& shapes, bool need_full_run, std::size_t occurring_steps,
                   std::vector<McEstimate>& out) {
  const auto run = run_cps(inst, src, need_full_run ? default_max_steps(inst) : occurring_steps);
  const auto& log = run.log;
  WitnessBuilder builder(inst.graph(), log);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& tgt = targets[k];
    const EventId v = tgt.tree.root().event;
    bool hit = false;
    if (tgt.possible) {
      const std::uint32_t R = tgt.tree.g_radius();
      for (std::size_t t = 1; t <= log.total_steps() && !hit; ++t)
        if (std::binary_search(log.at(t).begin(), log.at(t).end(), v))
          hit = builder.build_possible(v, t, R).canonical_shape() == shapes[k];
    } else {
      // An occurring tree rooted at step t has depth exactly t - 1.
      const std::size_t t = tgt.tree.depth() + 1;
      if (t <= log.total_steps() && std::binary_search(log.at(t).begin(), log.at(t).end(), v))
        hit = builder.build_occurring(v, t).canonical_shape() == shapes[k];
    }
    out[k].hits += hit ? 1 : 0;
    ++out[k].trials;
  }
}

}  // namespace detail

/// Frequency with which each target is generated over `trials` independent
/// randomness tables. `pins`, when given, fixes variables to constants in
/// every table position.
inline std::vector<McEstimate> mc_tree_frequencies(const Instance& inst, std::span<const TreeTarget> targets,
                                                   std::size_t trials, std::uint64_t seed,
                                                   const std::vector<std::optional<Value>>* pins = nullptr) {
  std::vector<McEstimate> out(targets.size());
  std::vector<std::string> shapes;
  bool full = false;
  std::size_t steps = 1;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& tgt = targets[k];
    if (tgt.tree.size() > kMaxMonteCarloTreeSize)
      throw RegimeError("tree of size " + std::to_string(tgt.tree.size()) +
                        " is too large to resolve by Monte Carlo (max 3)");
    shapes.push_back(tgt.tree.canonical_shape());
    out[k].bound = tree_probability_bound(inst, tgt);
    full = full || tgt.possible;
    steps = std::max<std::size_t>(steps, tgt.tree.depth() + 1);
  }
  for (std::size_t trial = 0; trial < trials; ++trial) {
    RandomnessTable table(inst, combine_seed(seed, trial), 1);
    if (pins) {
      PinnedSource<RandomnessTable> src(table, *pins);
      detail::count_matches(inst, src, targets, shapes, full, steps, out);
    } else {
      detail::count_matches(inst, table, targets, shapes, full, steps, out);
    }
  }
  return out;
}

inline McEstimate mc_occurrence_probability(const Instance& inst, const WitnessTree& tree, std::size_t trials,
                                            std::uint64_t seed, bool possible = false) {
  const TreeTarget targets[] = {{tree, possible}};
  return mc_tree_frequencies(inst, targets, trials, seed).front();
}

/// Variables touched by no event within G-distance g_radius + 1 of the root.
inline std::vector<VarId> outside_variables(const Instance& inst, const WitnessTree& tree) {
  std::vector<char> inside(inst.num_vars(), 0);
  for (EventId e : ball(inst.graph(), tree.root().event, tree.g_radius() + 1))
    for (VarId x : inst.event(e).vars) inside[x] = 1;
  std::vector<VarId> out;
  for (VarId x = 0; x < inst.num_vars(); ++x)
    if (!inside[x]) out.push_back(x);
  return out;
}

struct AdversarialScan {
  std::size_t settings = 0;
  McEstimate worst;         ///< setting with the highest frequency
  bool all_within = true;   ///< every setting met its bound
};

/// Repeats the estimate for every constant setting of the outside variables,
/// each pinned to the same value in all table positions.
inline AdversarialScan adversarial_scan(const Instance& inst, const TreeTarget& target, std::size_t trials,
                                        std::uint64_t seed) {
  const auto outside = outside_variables(inst, target.tree);
  std::size_t settings = 1;
  for (VarId x : outside) {
    settings *= inst.variable(x).domain_size;
    if (settings > kMaxAdversarialSettings)
      throw RegimeError("too many outside settings to scan exhaustively");
  }
  AdversarialScan scan;
  scan.settings = settings;
  std::vector<std::optional<Value>> pins(inst.num_vars());
  const TreeTarget targets[] = {target};
  for (std::size_t code = 0; code < settings; ++code) {
    std::size_t rest = code;
    for (VarId x : outside) {
      const auto q = inst.variable(x).domain_size;
      pins[x] = static_cast<Value>(rest % q);
      rest /= q;
    }
    const auto est = mc_tree_frequencies(inst, targets, trials, combine_seed(seed, code), &pins).front();
    if (code == 0 || est.frequency() > scan.worst.frequency()) scan.worst = est;
    scan.all_within = scan.all_within && est.within_bound();
  }
  return scan;
}

}  // namespace lll
