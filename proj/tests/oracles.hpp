// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

// Independent reference implementations used only by tests. Nothing here
// may call into the code path it is checking.

#pragma once

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include "lll/instance.hpp"
#include "lll/randomness.hpp"
#include "lll/resampler.hpp"

namespace lll::oracle {

/// Sum over every assignment of the event's variables.
inline double brute_probability(const Instance& inst, EventId e) {
  const auto& ev = inst.event(e);
  std::vector<Value> a(ev.vars.size(), 0);
  double total = 0.0;
  while (true) {
    if (ev.holds(a)) {
      double w = 1.0;
      for (std::size_t i = 0; i < a.size(); ++i) w *= inst.variable(ev.vars[i]).distribution[a[i]];
      total += w;
    }
    std::size_t i = 0;
    for (; i < a.size(); ++i) {
      if (++a[i] < inst.variable(ev.vars[i]).domain_size) break;
      a[i] = 0;
    }
    if (i == a.size()) break;
  }
  return total;
}

/// Table with hand-written columns; entries past a column's end repeat its
/// last value.
struct ScriptedSource {
  std::vector<std::vector<Value>> columns;

  [[nodiscard]] Value value(VarId x, std::size_t index) const {
    const auto& c = columns.at(x);
    return c[std::min(index, c.size() - 1)];
  }
};

/// All-pairs distances by Floyd–Warshall on an explicit adjacency matrix.
inline std::vector<std::vector<unsigned>> all_pairs(const DependencyGraph& g) {
  const unsigned inf = 1u << 30;
  const auto n = g.size();
  std::vector<std::vector<unsigned>> d(n, std::vector<unsigned>(n, inf));
  for (EventId v = 0; v < n; ++v) {
    d[v][v] = 0;
    for (EventId u : g.neighbors(v)) d[v][u] = 1;
  }
  for (EventId k = 0; k < n; ++k)
    for (EventId i = 0; i < n; ++i)
      for (EventId j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

/// Resampler that recomputes the satisfied set from scratch every step.
template <ValueSource Source>
ExecutionLog reference_cps(const Instance& inst, const Source& src, std::size_t max_steps) {
  ExecutionLog log;
  AssignmentView view(inst.num_vars(), 0);
  while (log.total_steps() < max_steps) {
    std::vector<EventId> sat;
    for (EventId e = 0; e < inst.n(); ++e) {
      std::vector<Value> vals;
      for (VarId x : inst.event(e).vars) vals.push_back(src.value(x, view[x]));
      if (eval_event(inst.event(e), vals)) sat.push_back(e);
    }
    if (sat.empty()) {
      log.terminated = true;
      break;
    }
    std::vector<EventId> chosen;
    for (EventId v : sat) {
      bool lower = false;
      for (EventId u : sat)
        if (u < v && inst.graph().adjacent(u, v)) lower = true;
      if (!lower) chosen.push_back(v);
    }
    for (EventId v : chosen)
      for (VarId x : inst.event(v).vars) ++view[x];
    log.steps.push_back(chosen);
  }
  log.resample_counts = view;
  return log;
}

struct RefNode {
  EventId event;
  std::size_t step;
  int parent;
  unsigned depth;
};

/// Witness tree by direct scan: each copy in S_i (i < t) within distance R
/// of the root looks at every node already attached from a later step and
/// takes the deepest one within distance 2, ties by higher event id, then
/// later step. R < 0 means no filter.
inline std::vector<RefNode> reference_tree(const std::vector<std::vector<unsigned>>& dist,
                                           const ExecutionLog& log, EventId v, std::size_t t, long R = -1) {
  std::vector<RefNode> nodes{{v, t, -1, 0}};
  for (std::size_t i = t - 1; i >= 1; --i) {
    const std::size_t existing = nodes.size();
    for (EventId u : log.at(i)) {
      if (R >= 0 && dist[v][u] > static_cast<unsigned>(R)) continue;
      int best = -1;
      for (std::size_t j = 0; j < existing; ++j) {
        if (dist[u][nodes[j].event] > 2) continue;
        if (best < 0) {
          best = static_cast<int>(j);
          continue;
        }
        const auto& a = nodes[j];
        const auto& b = nodes[best];
        if (std::tie(a.depth, a.event, a.step) > std::tie(b.depth, b.event, b.step)) best = static_cast<int>(j);
      }
      if (best >= 0) nodes.push_back({u, i, best, nodes[best].depth + 1});
    }
  }
  return nodes;
}

/// Unordered labelled trees as canonical strings, generated by assigning
/// every non-root node i a parent j < i and a label within distance 2 of the
/// parent's label, then deduplicating. Counts all sizes 1..max_size.
inline std::size_t brute_tree_count(const DependencyGraph& g, EventId root, std::size_t max_size) {
  const auto dist = all_pairs(g);
  std::set<std::string> seen;
  std::vector<EventId> label{root};
  std::vector<int> parent{-1};
  std::function<std::string(int)> canon = [&](int i) {
    std::vector<std::string> parts;
    for (std::size_t c = 1; c < label.size(); ++c)
      if (parent[c] == i) parts.push_back(canon(static_cast<int>(c)));
    std::sort(parts.begin(), parts.end());
    std::string s = "(" + std::to_string(label[i]);
    for (auto& p : parts) s += p;
    return s + ")";
  };
  std::function<void()> grow = [&] {
    seen.insert(canon(0));
    if (label.size() == max_size) return;
    for (std::size_t j = 0; j < label.size(); ++j) {
      for (EventId b = 0; b < g.size(); ++b) {
        if (dist[label[j]][b] > 2) continue;
        label.push_back(b);
        parent.push_back(static_cast<int>(j));
        grow();
        label.pop_back();
        parent.pop_back();
      }
    }
  };
  grow();
  return seen.size();
}

}  // namespace lll::oracle
