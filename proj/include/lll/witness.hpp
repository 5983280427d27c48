// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "lll/graph.hpp"
#include "lll/instance.hpp"
#include "lll/resampler.hpp"

namespace lll {

struct TreeNode {
  EventId event = 0;
  std::uint32_t step = 0;
  std::int32_t parent = -1;  // index into the node list; -1 for the root
  std::uint32_t depth = 0;   // distance to the root in the tree
  std::uint32_t g_dist = 0;  // distance to the root event in G
};

struct TreeStats {
  std::size_t size = 0;
  std::uint32_t depth = 0;
  std::uint32_t g_radius = 0;
  std::size_t boundary_count = 0;

  bool operator==(const TreeStats&) const = default;
};

/// Witness tree over event copies. Nodes are stored root first, then in the
/// order they were attached (decreasing step).
class WitnessTree {
 public:
  explicit WitnessTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  [[nodiscard]] const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const TreeNode& root() const { return nodes_.front(); }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

  [[nodiscard]] std::uint32_t depth() const {
    std::uint32_t d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.depth);
    return d;
  }
  [[nodiscard]] std::uint32_t g_radius() const {
    std::uint32_t r = 0;
    for (const auto& n : nodes_) r = std::max(r, n.g_dist);
    return r;
  }
  /// Nodes at G-distance exactly g_radius() from the root. A single-node tree
  /// has radius 0, so its root is a boundary event.
  [[nodiscard]] std::size_t boundary_count() const {
    const auto r = g_radius();
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [r](const TreeNode& n) { return n.g_dist == r; }));
  }
  [[nodiscard]] TreeStats stats() const { return {size(), depth(), g_radius(), boundary_count()}; }

  /// Sorted (event, step) pairs; the node multiset with copies distinguished by step.
  [[nodiscard]] std::vector<std::pair<EventId, std::uint32_t>> node_multiset() const {
    std::vector<std::pair<EventId, std::uint32_t>> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.emplace_back(n.event, n.step);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Label shape ignoring step labels: children sorted by their own shape.
  [[nodiscard]] std::string canonical_shape() const {
    std::vector<std::vector<std::size_t>> children(nodes_.size());
    for (std::size_t i = 1; i < nodes_.size(); ++i) children[nodes_[i].parent].push_back(i);
    std::function<std::string(std::size_t)> rec = [&](std::size_t i) {
      std::vector<std::string> parts;
      for (auto c : children[i]) parts.push_back(rec(c));
      std::sort(parts.begin(), parts.end());
      std::string s = "(" + std::to_string(nodes_[i].event);
      for (auto& p : parts) s += p;
      return s + ")";
    };
    return rec(0);
  }

  /// One node per line: depth, event id, step, parent index (root first).
  [[nodiscard]] std::string dump() const {
    std::ostringstream os;
    for (const auto& n : nodes_) os << n.depth << '\t' << n.event << '\t' << n.step << '\t' << n.parent << '\n';
    return os.str();
  }

 private:
  std::vector<TreeNode> nodes_;
};

inline bool is_narrow(std::size_t size, std::size_t boundary, double eps) {
  return static_cast<double>(boundary) <= eps * static_cast<double>(size) + 1e-9;
}

inline bool is_narrow(const WitnessTree& tree, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
  return is_narrow(tree.size(), tree.boundary_count(), eps);
}

/// Size and boundary of the R-possible tree for one R.
struct RadiusSummary {
  std::uint32_t R = 0;
  std::size_t size = 0;
  std::uint32_t g_radius = 0;
  std::size_t boundary = 0;
};

/// For one root (v, t): every resampled copy that joins the R-possible tree
/// for some R <= cap, with the least such R ("need") and its G-distance.
/// The R-possible node set is exactly {need <= R}, which makes the trees
/// nested in R.
struct PossibleProfile {
  struct Entry {
    std::uint32_t need;
    std::uint32_t g_dist;
  };
  std::vector<Entry> entries;  // root first

  [[nodiscard]] std::size_t size_at(std::uint32_t R) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [R](const Entry& e) { return e.need <= R; }));
  }

  /// Summaries for R = 0..max_R.
  [[nodiscard]] std::vector<RadiusSummary> summaries(std::uint32_t max_R) const {
    std::vector<Entry> sorted(entries);
    std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) { return a.need < b.need; });
    std::vector<std::size_t> by_dist(max_R + 2, 0);
    std::vector<RadiusSummary> out;
    out.reserve(max_R + 1);
    std::size_t next = 0, size = 0;
    std::uint32_t radius = 0;
    for (std::uint32_t R = 0; R <= max_R; ++R) {
      while (next < sorted.size() && sorted[next].need <= R) {
        ++by_dist[sorted[next].g_dist];
        radius = std::max(radius, sorted[next].g_dist);
        ++size;
        ++next;
      }
      out.push_back({R, size, radius, by_dist[radius]});
    }
    return out;
  }
};

/// Generates occurring and R-possible witness trees from a log. Holds
/// scratch arrays sized to the graph so repeated builds do not allocate.
///
/// Same-step copies never attach to each other: every u in S_i looks for a
/// parent among nodes attached from steps > i. Among candidate parents the
/// deepest wins, then the highest event id, then the later step.
class WitnessBuilder {
 public:
  WitnessBuilder(const DependencyGraph& g, const ExecutionLog& log)
      : graph_(&g), log_(&log), bfs_(g), best_(g.size(), 0), stamp_of_(g.size(), 0) {}

  /// Occurring tree when R == kUnreached, otherwise the R-possible tree.
  [[nodiscard]] WitnessTree build(EventId v, std::size_t t, std::uint32_t R = kUnreached) {
    require_root(v, t);
    const std::uint32_t radius = std::min<std::uint64_t>(R, 2 * (t - 1));
    bfs_.run(v, radius);
    next_stamp();
    std::vector<TreeNode> nodes{{v, static_cast<std::uint32_t>(t), -1, 0, 0}};
    mark(v, 0, nodes);
    std::vector<std::pair<EventId, std::int32_t>> pending;
    for (std::size_t i = t - 1; i >= 1; --i) {
      pending.clear();
      for (EventId u : log_->at(i)) {
        if (bfs_.distance(u) > radius) continue;
        const std::int32_t parent = best_parent(u, nodes);
        if (parent >= 0) pending.emplace_back(u, parent);
      }
      for (auto [u, parent] : pending) {
        nodes.push_back({u, static_cast<std::uint32_t>(i), parent, nodes[parent].depth + 1, bfs_.distance(u)});
        mark(u, static_cast<std::int32_t>(nodes.size() - 1), nodes);
      }
    }
    return WitnessTree(std::move(nodes));
  }

  [[nodiscard]] WitnessTree build_occurring(EventId v, std::size_t t) { return build(v, t); }
  [[nodiscard]] WitnessTree build_possible(EventId v, std::size_t t, std::uint32_t R) { return build(v, t, R); }

  /// Nested R-possible node sets for all R <= cap (cap = kUnreached gives the
  /// occurring tree as the limit).
  [[nodiscard]] PossibleProfile profile(EventId v, std::size_t t, std::uint32_t cap = kUnreached) {
    require_root(v, t);
    const std::uint32_t radius = std::min<std::uint64_t>(cap, 2 * (t - 1));
    bfs_.run(v, radius);
    next_stamp();
    PossibleProfile prof;
    prof.entries.push_back({0, 0});
    set_need(v, 0);
    std::vector<std::pair<EventId, std::uint32_t>> pending;
    for (std::size_t i = t - 1; i >= 1; --i) {
      pending.clear();
      for (EventId u : log_->at(i)) {
        const std::uint32_t du = bfs_.distance(u);
        if (du > radius) continue;
        std::uint32_t m = kUnreached;
        for_closed_square(u, [&](EventId e) {
          if (stamp_of_[e] == stamp_) m = std::min(m, best_[e]);
        });
        if (m == kUnreached) continue;
        pending.emplace_back(u, std::max(du, m));
      }
      for (auto [u, need] : pending) {
        prof.entries.push_back({need, bfs_.distance(u)});
        set_need(u, need);
      }
    }
    return prof;
  }

 private:
  void require_root(EventId v, std::size_t t) const {
    if (t < 1 || t > log_->total_steps())
      throw ValidationError("root step " + std::to_string(t) + " outside the log");
    const auto& s = log_->at(t);
    if (!std::binary_search(s.begin(), s.end(), v))
      throw ValidationError("event " + std::to_string(v) + " is not resampled at step " + std::to_string(t));
  }

  template <class F>
  void for_closed_square(EventId u, F&& f) const {
    f(u);
    for (EventId w : graph_->neighbors(u)) {
      f(w);
      for (EventId x : graph_->neighbors(w)) f(x);
    }
  }

  void next_stamp() {
    if (++stamp_ == 0) {
      std::fill(stamp_of_.begin(), stamp_of_.end(), 0);
      stamp_ = 1;
    }
  }

  // best_[e] is the index of e's preferred copy (deepest, then latest step).
  void mark(EventId e, std::int32_t idx, const std::vector<TreeNode>& nodes) {
    if (stamp_of_[e] == stamp_) {
      const auto& cur = nodes[best_[e]];
      const auto& cand = nodes[idx];
      if (std::tie(cand.depth, cand.step) <= std::tie(cur.depth, cur.step)) return;
    }
    stamp_of_[e] = stamp_;
    best_[e] = static_cast<std::uint32_t>(idx);
  }

  void set_need(EventId e, std::uint32_t need) {
    if (stamp_of_[e] == stamp_ && best_[e] <= need) return;
    stamp_of_[e] = stamp_;
    best_[e] = need;
  }

  std::int32_t best_parent(EventId u, const std::vector<TreeNode>& nodes) const {
    std::int32_t choice = -1;
    for_closed_square(u, [&](EventId e) {
      if (stamp_of_[e] != stamp_) return;
      const auto idx = static_cast<std::int32_t>(best_[e]);
      if (choice < 0) {
        choice = idx;
        return;
      }
      const auto& a = nodes[idx];
      const auto& b = nodes[choice];
      if (std::tie(a.depth, a.event, a.step) > std::tie(b.depth, b.event, b.step)) choice = idx;
    });
    return choice;
  }

  const DependencyGraph* graph_;
  const ExecutionLog* log_;
  Bfs bfs_;
  std::vector<std::uint32_t> best_;
  std::vector<std::uint32_t> stamp_of_;
  std::uint32_t stamp_ = 0;
};

inline WitnessTree build_occurring(const DependencyGraph& g, const ExecutionLog& log, EventId v, std::size_t t) {
  return WitnessBuilder(g, log).build_occurring(v, t);
}

inline WitnessTree build_possible(const DependencyGraph& g, const ExecutionLog& log, EventId v, std::size_t t,
                                  std::uint32_t R) {
  return WitnessBuilder(g, log).build_possible(v, t, R);
}

/// Number of tree nodes whose event depends on x and whose tree depth is at
/// least that of `node` (the node itself included).
inline std::uint32_t value_index_in_tree(const Instance& inst, const WitnessTree& tree, std::size_t node, VarId x) {
  const auto& target = tree.nodes().at(node);
  const auto& scope = inst.event(target.event).vars;
  if (std::find(scope.begin(), scope.end(), x) == scope.end())
    throw ValidationError("variable " + std::to_string(x) + " is not a dependent variable of event " +
                          std::to_string(target.event));
  std::uint32_t k = 0;
  for (const auto& n : tree.nodes()) {
    if (n.depth < target.depth) continue;
    const auto& vars = inst.event(n.event).vars;
    if (std::find(vars.begin(), vars.end(), x) != vars.end()) ++k;
  }
  return k;
}

struct OccurringSummary {
  std::size_t max_size = 0;
  double threshold = 0.0;  // 5 log_{1/p} n
  bool e_good = true;
};

/// Largest occurring witness tree over all roots of the log.
inline OccurringSummary max_occurring_tree_size(const Instance& inst, const ExecutionLog& log) {
  OccurringSummary s;
  s.threshold = 5.0 * inst.log_inv_p_n();
  WitnessBuilder builder(inst.graph(), log);
  for (std::size_t t = 1; t <= log.total_steps(); ++t)
    for (EventId v : log.at(t)) s.max_size = std::max(s.max_size, builder.profile(v, t).entries.size());
  s.e_good = s.max_size == 0 || static_cast<double>(s.max_size) < s.threshold;
  return s;
}

}  // namespace lll
