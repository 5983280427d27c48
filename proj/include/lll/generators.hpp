// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "lll/instance.hpp"
#include "lll/randomness.hpp"

namespace lll {

namespace detail {

inline constexpr int kGeneratorAttempts = 64;

struct SlotAssignment {
  std::vector<std::vector<VarId>> scopes;
  std::uint32_t num_vars = 0;
};

// Places `count` scopes of `width` distinct variables so that no variable is
// used more than `max_occurrence` times. Unused variables are dropped and the
// rest renumbered in order of first use.
inline SlotAssignment assign_slots(std::uint32_t count, std::uint32_t width, std::uint32_t max_occurrence,
                                   std::uint64_t seed) {
  const std::uint64_t needed = static_cast<std::uint64_t>(count) * width;
  const auto num_vars = static_cast<std::uint32_t>(
      std::max<std::uint64_t>((needed + max_occurrence - 1) / max_occurrence, width));
  SplitMix rng(seed);
  std::vector<VarId> pool;
  pool.reserve(static_cast<std::size_t>(num_vars) * max_occurrence);
  for (VarId x = 0; x < num_vars; ++x)
    for (std::uint32_t r = 0; r < max_occurrence; ++r) pool.push_back(x);

  auto scope_of = [&](std::size_t pos) { return pos / width; };
  auto clashes = [&](std::size_t pos, VarId x) {
    if (pos >= needed) return false;
    const std::size_t base = scope_of(pos) * width;
    for (std::size_t j = base; j < base + width; ++j)
      if (j != pos && pool[j] == x) return true;
    return false;
  };

  for (int attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    rng.shuffle(pool);
    bool ok = true;
    for (std::size_t pos = 0; pos < needed && ok; ++pos) {
      if (!clashes(pos, pool[pos])) continue;
      ok = false;
      for (int tries = 0; tries < 4096; ++tries) {
        const std::size_t other = rng.below(pool.size());
        if (other == pos || pool[other] == pool[pos]) continue;
        if (clashes(pos, pool[other]) || clashes(other, pool[pos])) continue;
        std::swap(pool[pos], pool[other]);
        ok = true;
        break;
      }
    }
    if (!ok) continue;
    std::vector<VarId> rename(num_vars, kUnreached);
    SlotAssignment out;
    out.scopes.resize(count);
    for (std::size_t pos = 0; pos < needed; ++pos) {
      VarId& r = rename[pool[pos]];
      if (r == kUnreached) r = out.num_vars++;
      out.scopes[scope_of(pos)].push_back(r);
    }
    return out;
  }
  throw ValidationError("generator could not place variables under the occurrence bound");
}

}  // namespace detail

/// Random k-SAT with bounded variable occurrence; each clause is a bad event
/// that holds iff the clause is falsified (p = 2^-k, d <= k(max_occurrence-1)).
inline Instance gen_ksat(std::uint32_t num_clauses, std::uint32_t k, std::uint32_t max_occurrence,
                         std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be >= 2");
  if (max_occurrence < 1) throw ValidationError("max_occurrence must be >= 1");
  if (num_clauses < 1) throw ValidationError("num_clauses must be >= 1");
  if (k > kMaxEventVars) throw ValidationError("k exceeds the 20-variable event limit");
  auto slots = detail::assign_slots(num_clauses, k, max_occurrence, seed);
  SplitMix signs(combine_seed(seed, 0x5167));
  std::vector<Variable> vars;
  vars.reserve(slots.num_vars);
  for (VarId x = 0; x < slots.num_vars; ++x) vars.push_back(Variable::uniform(x, 2));
  std::vector<BadEvent> events;
  events.reserve(num_clauses);
  for (EventId e = 0; e < num_clauses; ++e) {
    std::vector<Value> falsifying(k);
    for (auto& b : falsifying) b = static_cast<Value>(signs.below(2));
    events.push_back(BadEvent::clause(e, std::move(slots.scopes[e]), std::move(falsifying)));
  }
  return Instance(std::move(vars), std::move(events));
}

/// Random hypergraph coloring with bounded vertex degree; each hyperedge is a
/// bad event that holds iff it is monochromatic (p = colors^{1-edge_size}).
inline Instance gen_hypergraph_coloring(std::uint32_t num_edges, std::uint32_t edge_size,
                                        std::uint32_t max_degree, std::uint32_t num_colors,
                                        std::uint64_t seed) {
  if (edge_size < 2) throw ValidationError("edge_size must be >= 2");
  if (max_degree < 1) throw ValidationError("max_degree must be >= 1");
  if (num_colors < 2) throw ValidationError("num_colors must be >= 2");
  if (num_edges < 1) throw ValidationError("num_edges must be >= 1");
  if (edge_size > kMaxEventVars) throw ValidationError("edge_size exceeds the 20-variable event limit");
  auto slots = detail::assign_slots(num_edges, edge_size, max_degree, seed);
  std::vector<Variable> vars;
  vars.reserve(slots.num_vars);
  for (VarId x = 0; x < slots.num_vars; ++x) vars.push_back(Variable::uniform(x, num_colors));
  std::vector<BadEvent> events;
  events.reserve(num_edges);
  for (EventId e = 0; e < num_edges; ++e)
    events.push_back(BadEvent::monochromatic(e, std::move(slots.scopes[e])));
  return Instance(std::move(vars), std::move(events));
}

/// Relabels events by a seeded random permutation (equivalent in
/// distribution to drawing random IDs).
inline Instance permute_event_ids(const Instance& inst, std::uint64_t seed) {
  std::vector<EventId> perm(inst.n());
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix rng(seed);
  rng.shuffle(perm);
  std::vector<BadEvent> events(inst.n());
  for (EventId e = 0; e < inst.n(); ++e) {
    BadEvent moved = inst.event(e);
    moved.id = perm[e];
    events[perm[e]] = std::move(moved);
  }
  return Instance(inst.variables(), std::move(events));
}

}  // namespace lll
