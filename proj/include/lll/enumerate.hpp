// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lll/graph.hpp"

namespace lll {

class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxEnumerationSize = 8;
inline constexpr std::uint32_t kMaxEnumerationDegree = 4;

/// Rooted unordered tree labelled by events, in preorder.
struct AbstractTree {
  std::vector<EventId> labels;
  std::vector<std::int32_t> parent;  // -1 for the root

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
};

/// (5 d^2)^k, the counting bound for witness trees of size at most k.
inline double tree_count_bound(std::uint32_t d, std::size_t k) {
  return std::pow(5.0 * d * d, static_cast<double>(k));
}

/// Exhaustive enumeration of abstract witness trees: rooted unordered trees
/// whose every child is labelled by an event within G-distance 2 of its
/// parent's event (a copy of the parent itself included).
///
/// Trees are built bottom-up: a tree is a root label plus a multiset of child
/// subtrees, and each multiset is emitted once as a non-decreasing sequence of
/// subtree ids. Every distinct tree therefore gets exactly one id.
class TreeEnumerator {
 public:
  TreeEnumerator(const DependencyGraph& g, std::size_t max_size) : graph_(&g), max_size_(max_size) {
    if (max_size_ > kMaxEnumerationSize || g.max_degree() > kMaxEnumerationDegree)
      throw RegimeError("exhaustive enumeration needs max_size <= 8 and d <= 4 (got max_size " +
                        std::to_string(max_size_) + ", d " + std::to_string(g.max_degree()) +
                        "); use tree_count_bound instead");
  }

  /// Number of trees rooted at v with at most max_size nodes.
  std::size_t count(EventId v) {
    std::size_t total = 0;
    for (std::size_t s = 1; s <= max_size_; ++s) total += trees(v, s).size();
    return total;
  }

  /// Calls fn(const AbstractTree&) once per tree rooted at v, smallest first.
  template <class F>
  void for_each(EventId v, F&& fn) {
    for (std::size_t s = 1; s <= max_size_; ++s) {
      for (std::uint32_t id : trees(v, s)) {
        AbstractTree t;
        expand(id, -1, t);
        fn(t);
      }
    }
  }

 private:
  struct Shape {
    EventId label;
    std::size_t size;
    std::vector<std::uint32_t> children;
  };

  const std::vector<std::uint32_t>& trees(EventId a, std::size_t s) {
    const auto key = std::make_pair(a, s);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<std::uint32_t> out;
    if (s == 1) {
      out.push_back(add_shape({a, 1, {}}));
    } else {
      std::vector<std::uint32_t> pool;
      for (EventId b : closed_square(a))
        for (std::size_t sz = 1; sz < s; ++sz) {
          const auto& sub = trees(b, sz);
          pool.insert(pool.end(), sub.begin(), sub.end());
        }
      std::sort(pool.begin(), pool.end());
      std::vector<std::uint32_t> chosen;
      combine(a, s, pool, 0, s - 1, chosen, out);
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  void combine(EventId a, std::size_t s, const std::vector<std::uint32_t>& pool, std::size_t from,
               std::size_t remaining, std::vector<std::uint32_t>& chosen, std::vector<std::uint32_t>& out) {
    if (remaining == 0) {
      out.push_back(add_shape({a, s, chosen}));
      return;
    }
    for (std::size_t i = from; i < pool.size(); ++i) {
      const std::size_t sz = shapes_[pool[i]].size;
      if (sz > remaining) continue;
      chosen.push_back(pool[i]);
      combine(a, s, pool, i, remaining - sz, chosen, out);
      chosen.pop_back();
    }
  }

  std::uint32_t add_shape(Shape sh) {
    shapes_.push_back(std::move(sh));
    return static_cast<std::uint32_t>(shapes_.size() - 1);
  }

  void expand(std::uint32_t id, std::int32_t parent, AbstractTree& t) const {
    const auto& sh = shapes_[id];
    const auto self = static_cast<std::int32_t>(t.labels.size());
    t.labels.push_back(sh.label);
    t.parent.push_back(parent);
    for (std::uint32_t c : sh.children) expand(c, self, t);
  }

  std::vector<EventId> closed_square(EventId a) const {
    auto out = graph_->square_neighbors(a);
    out.insert(std::lower_bound(out.begin(), out.end(), a), a);
    return out;
  }

  const DependencyGraph* graph_;
  std::size_t max_size_;
  std::vector<Shape> shapes_;
  std::map<std::pair<EventId, std::size_t>, std::vector<std::uint32_t>> memo_;
};

inline std::vector<AbstractTree> enumerate_trees(const DependencyGraph& g, EventId v, std::size_t max_size) {
  std::vector<AbstractTree> out;
  TreeEnumerator(g, max_size).for_each(v, [&](const AbstractTree& t) { out.push_back(t); });
  return out;
}

}  // namespace lll
