// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lll {

using EventId = std::uint32_t;

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Undirected simple graph over events, stored as CSR with sorted rows.
class DependencyGraph {
 public:
  DependencyGraph() = default;

  /// Builds from per-node neighbor lists. Lists are symmetrized, deduplicated
  /// and self-loops dropped.
  explicit DependencyGraph(const std::vector<std::vector<EventId>>& lists) {
    const auto n = static_cast<EventId>(lists.size());
    std::vector<std::vector<EventId>> sym(n);
    for (EventId v = 0; v < n; ++v) {
      for (EventId u : lists[v]) {
        if (u >= n) throw ValidationError("neighbor id out of range: " + std::to_string(u));
        if (u == v) continue;
        sym[v].push_back(u);
        sym[u].push_back(v);
      }
    }
    offsets_.assign(n + 1, 0);
    for (EventId v = 0; v < n; ++v) {
      auto& row = sym[v];
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      offsets_[v + 1] = offsets_[v] + row.size();
      max_degree_ = std::max<std::uint32_t>(max_degree_, static_cast<std::uint32_t>(row.size()));
    }
    targets_.reserve(offsets_.back());
    for (auto& row : sym) targets_.insert(targets_.end(), row.begin(), row.end());
  }

  [[nodiscard]] EventId size() const noexcept {
    return offsets_.empty() ? 0 : static_cast<EventId>(offsets_.size() - 1);
  }
  [[nodiscard]] std::uint32_t max_degree() const noexcept { return max_degree_; }
  [[nodiscard]] std::size_t edge_count() const noexcept { return targets_.size() / 2; }

  [[nodiscard]] std::span<const EventId> neighbors(EventId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }

  [[nodiscard]] bool adjacent(EventId u, EventId v) const {
    auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  /// Events at graph distance 1 or 2 from v (v itself excluded).
  [[nodiscard]] std::vector<EventId> square_neighbors(EventId v) const {
    std::vector<EventId> out;
    for (EventId u : neighbors(v)) {
      out.push_back(u);
      for (EventId w : neighbors(u))
        if (w != v) out.push_back(w);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<EventId> targets_;
  std::uint32_t max_degree_ = 0;
};

/// Reusable BFS state. Distances are valid only for nodes visited by the
/// most recent run; `order()` lists them in nondecreasing distance.
class Bfs {
 public:
  explicit Bfs(const DependencyGraph& g) : graph_(&g), dist_(g.size(), kUnreached) {}

  void run(EventId source, std::uint32_t radius = kUnreached) {
    const EventId sources[] = {source};
    run(std::span<const EventId>(sources), radius);
  }

  void run(std::span<const EventId> sources, std::uint32_t radius = kUnreached) {
    for (EventId v : order_) dist_[v] = kUnreached;
    order_.clear();
    for (EventId s : sources) {
      if (dist_[s] == kUnreached) {
        dist_[s] = 0;
        order_.push_back(s);
      }
    }
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const EventId v = order_[head];
      if (dist_[v] >= radius) continue;
      for (EventId u : graph_->neighbors(v)) {
        if (dist_[u] == kUnreached) {
          dist_[u] = dist_[v] + 1;
          order_.push_back(u);
        }
      }
    }
  }

  [[nodiscard]] std::uint32_t distance(EventId v) const { return dist_[v]; }
  [[nodiscard]] const std::vector<EventId>& order() const noexcept { return order_; }

 private:
  const DependencyGraph* graph_;
  std::vector<std::uint32_t> dist_;
  std::vector<EventId> order_;
};

/// All events within graph distance r of v, sorted by id.
inline std::vector<EventId> ball(const DependencyGraph& g, EventId v, std::uint32_t r) {
  Bfs bfs(g);
  bfs.run(v, r);
  std::vector<EventId> out = bfs.order();
  std::sort(out.begin(), out.end());
  return out;
}

inline std::uint32_t distance(const DependencyGraph& g, EventId u, EventId v) {
  Bfs bfs(g);
  bfs.run(u);
  return bfs.distance(v);
}

/// True iff the node set induces a connected subgraph (empty sets count as connected).
inline bool is_connected_subset(const DependencyGraph& g, std::span<const EventId> nodes) {
  if (nodes.empty()) return true;
  std::vector<char> in(g.size(), 0), seen(g.size(), 0);
  std::size_t distinct = 0;
  for (EventId v : nodes) {
    if (!in[v]) ++distinct;
    in[v] = 1;
  }
  std::vector<EventId> stack{nodes.front()};
  seen[nodes.front()] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    EventId v = stack.back();
    stack.pop_back();
    for (EventId u : g.neighbors(v)) {
      if (in[u] && !seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == distinct;
}

}  // namespace lll
