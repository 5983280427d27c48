// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lll/graph.hpp"

namespace lll {

using VarId = std::uint32_t;
using Value = std::uint32_t;

inline constexpr std::size_t kMaxEventVars = 20;
inline constexpr double kDistributionTolerance = 1e-12;

struct Variable {
  VarId id = 0;
  std::uint32_t domain_size = 2;
  std::vector<double> distribution;

  static Variable uniform(VarId id, std::uint32_t q) {
    return Variable{id, q, std::vector<double>(q, 1.0 / q)};
  }
};

enum class PredicateKind { ForbiddenSet, Clause, Monochromatic };

inline const char* to_string(PredicateKind k) {
  switch (k) {
    case PredicateKind::ForbiddenSet: return "forbidden-set";
    case PredicateKind::Clause: return "clause";
    case PredicateKind::Monochromatic: return "monochromatic";
  }
  return "?";
}

/// A bad event over an ordered variable list. Its id doubles as the
/// tie-breaking priority of the resampler (lower id wins).
struct BadEvent {
  EventId id = 0;
  std::vector<VarId> vars;
  PredicateKind kind = PredicateKind::ForbiddenSet;
  /// ForbiddenSet: violating assignments over `vars`.
  std::vector<std::vector<Value>> forbidden;
  /// Clause: the single falsifying assignment over `vars`.
  std::vector<Value> falsifying;

  /// True iff the event occurs. `values[i]` is the value of `vars[i]`.
  [[nodiscard]] bool holds(std::span<const Value> values) const {
    switch (kind) {
      case PredicateKind::Clause:
        for (std::size_t i = 0; i < values.size(); ++i)
          if (values[i] != falsifying[i]) return false;
        return true;
      case PredicateKind::Monochromatic:
        for (std::size_t i = 1; i < values.size(); ++i)
          if (values[i] != values[0]) return false;
        return true;
      case PredicateKind::ForbiddenSet:
        for (const auto& row : forbidden)
          if (std::equal(row.begin(), row.end(), values.begin(), values.end())) return true;
        return false;
    }
    return false;
  }

  static BadEvent clause(EventId id, std::vector<VarId> vars, std::vector<Value> falsifying) {
    BadEvent e;
    e.id = id;
    e.vars = std::move(vars);
    e.kind = PredicateKind::Clause;
    e.falsifying = std::move(falsifying);
    return e;
  }
  static BadEvent monochromatic(EventId id, std::vector<VarId> vars) {
    BadEvent e;
    e.id = id;
    e.vars = std::move(vars);
    e.kind = PredicateKind::Monochromatic;
    return e;
  }
  static BadEvent forbidden_set(EventId id, std::vector<VarId> vars,
                                std::vector<std::vector<Value>> rows) {
    BadEvent e;
    e.id = id;
    e.vars = std::move(vars);
    e.kind = PredicateKind::ForbiddenSet;
    e.forbidden = std::move(rows);
    return e;
  }
};

/// Checked evaluation: the assignment must cover exactly the event's variables.
inline bool eval_event(const BadEvent& e, std::span<const Value> values) {
  if (values.size() != e.vars.size())
    throw ValidationError("assignment covers " + std::to_string(values.size()) +
                          " values, event " + std::to_string(e.id) + " has " +
                          std::to_string(e.vars.size()) + " variables");
  return e.holds(values);
}

/// Validated, immutable LLL instance with its dependency graph and exact
/// per-event probabilities.
class Instance {
 public:
  Instance(std::vector<Variable> variables, std::vector<BadEvent> events)
      : variables_(std::move(variables)), events_(std::move(events)) {
    validate();
    build_incidence();
    std::vector<std::vector<EventId>> lists(events_.size());
    for (const auto& users : var_events_)
      for (std::size_t i = 0; i < users.size(); ++i)
        for (std::size_t j = i + 1; j < users.size(); ++j) lists[users[i]].push_back(users[j]);
    graph_ = DependencyGraph(lists);
    probabilities_.reserve(events_.size());
    for (const auto& e : events_) {
      probabilities_.push_back(compute_probability(e));
      p_ = std::max(p_, probabilities_.back());
    }
  }

  [[nodiscard]] const std::vector<Variable>& variables() const noexcept { return variables_; }
  [[nodiscard]] const std::vector<BadEvent>& events() const noexcept { return events_; }
  [[nodiscard]] const Variable& variable(VarId x) const { return variables_.at(x); }
  [[nodiscard]] const BadEvent& event(EventId e) const { return events_.at(e); }
  [[nodiscard]] const DependencyGraph& graph() const noexcept { return graph_; }
  /// Events whose variable list contains x, sorted.
  [[nodiscard]] std::span<const EventId> events_of(VarId x) const { return var_events_[x]; }

  [[nodiscard]] EventId n() const noexcept { return static_cast<EventId>(events_.size()); }
  [[nodiscard]] std::uint32_t d() const noexcept { return graph_.max_degree(); }
  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] double probability(EventId e) const { return probabilities_.at(e); }
  [[nodiscard]] std::size_t num_vars() const noexcept { return variables_.size(); }

  /// log_{1/p} n; zero when p == 0 or n < 2.
  [[nodiscard]] double log_inv_p_n() const {
    if (p_ <= 0.0 || p_ >= 1.0 || n() < 2) return 0.0;
    return std::log(static_cast<double>(n())) / std::log(1.0 / p_);
  }

 private:
  void validate() const {
    if (events_.empty()) throw ValidationError("instance has no events");
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      const auto& v = variables_[i];
      if (v.id != i) throw ValidationError("variable ids must be 0..m-1 in order");
      if (v.domain_size < 2)
        throw ValidationError("variable " + std::to_string(i) + " has domain size < 2");
      if (v.distribution.size() != v.domain_size)
        throw ValidationError("variable " + std::to_string(i) + " distribution length mismatch");
      double sum = 0.0;
      for (double q : v.distribution) {
        if (!(q >= 0.0)) throw ValidationError("negative probability in variable " + std::to_string(i));
        sum += q;
      }
      if (std::abs(sum - 1.0) > kDistributionTolerance)
        throw ValidationError("distribution of variable " + std::to_string(i) + " does not sum to 1");
    }
    std::vector<char> used(variables_.size(), 0);
    for (std::size_t i = 0; i < events_.size(); ++i) {
      const auto& e = events_[i];
      const std::string tag = "event " + std::to_string(i);
      if (e.id != i) throw ValidationError("event ids must be 0..n-1 in order");
      if (e.vars.empty()) throw ValidationError(tag + " has no variables");
      if (e.vars.size() > kMaxEventVars) throw ValidationError(tag + " has more than 20 variables");
      std::vector<VarId> sorted = e.vars;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError(tag + " repeats a variable");
      for (VarId x : e.vars) {
        if (x >= variables_.size()) throw ValidationError(tag + " references unknown variable " + std::to_string(x));
        used[x] = 1;
      }
      auto in_domain = [&](std::span<const Value> row) {
        if (row.size() != e.vars.size()) return false;
        for (std::size_t j = 0; j < row.size(); ++j)
          if (row[j] >= variables_[e.vars[j]].domain_size) return false;
        return true;
      };
      switch (e.kind) {
        case PredicateKind::Clause:
          if (!in_domain(e.falsifying)) throw ValidationError(tag + " clause assignment invalid");
          break;
        case PredicateKind::ForbiddenSet: {
          for (const auto& row : e.forbidden)
            if (!in_domain(row)) throw ValidationError(tag + " forbidden assignment invalid");
          auto rows = e.forbidden;
          std::sort(rows.begin(), rows.end());
          if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
            throw ValidationError(tag + " lists a forbidden assignment twice");
          break;
        }
        case PredicateKind::Monochromatic:
          break;
      }
    }
    for (std::size_t x = 0; x < used.size(); ++x)
      if (!used[x]) throw ValidationError("variable " + std::to_string(x) + " is not referenced by any event");
  }

  void build_incidence() {
    var_events_.assign(variables_.size(), {});
    for (const auto& e : events_)
      for (VarId x : e.vars) var_events_[x].push_back(e.id);
  }

  // Closed forms per predicate kind; tests cross-check against full enumeration.
  [[nodiscard]] double compute_probability(const BadEvent& e) const {
    switch (e.kind) {
      case PredicateKind::Clause: {
        double prob = 1.0;
        for (std::size_t i = 0; i < e.vars.size(); ++i)
          prob *= variables_[e.vars[i]].distribution[e.falsifying[i]];
        return prob;
      }
      case PredicateKind::Monochromatic: {
        std::uint32_t q = kUnreached;
        for (VarId x : e.vars) q = std::min(q, variables_[x].domain_size);
        double prob = 0.0;
        for (Value c = 0; c < q; ++c) {
          double term = 1.0;
          for (VarId x : e.vars) term *= variables_[x].distribution[c];
          prob += term;
        }
        return prob;
      }
      case PredicateKind::ForbiddenSet: {
        double prob = 0.0;
        for (const auto& row : e.forbidden) {
          double term = 1.0;
          for (std::size_t i = 0; i < row.size(); ++i) term *= variables_[e.vars[i]].distribution[row[i]];
          prob += term;
        }
        return prob;
      }
    }
    return 0.0;
  }

  std::vector<Variable> variables_;
  std::vector<BadEvent> events_;
  std::vector<std::vector<EventId>> var_events_;
  DependencyGraph graph_;
  std::vector<double> probabilities_;
  double p_ = 0.0;
};

inline DependencyGraph build_dependency_graph(const Instance& inst) { return inst.graph(); }

inline double event_probability(const Instance& inst, EventId e) { return inst.probability(e); }

struct CriterionReport {
  std::uint32_t d = 0;
  double p = 0.0;
  double delta = 0.0;
  double threshold = 0.0;  ///< d^{-(10+delta)}; 0 when trivially local
  bool trivially_local = false;
  bool satisfied = false;
};

/// Polynomial criterion p <= d^{-(10+delta)}. Instances with d < 2 are
/// reported as trivially local and count as satisfied.
inline CriterionReport check_criterion(std::uint32_t d, double p, double delta) {
  CriterionReport r;
  r.d = d;
  r.p = p;
  r.delta = delta;
  if (r.d < 2) {
    r.trivially_local = true;
    r.satisfied = true;
    return r;
  }
  r.threshold = std::pow(static_cast<double>(r.d), -(10.0 + delta));
  r.satisfied = r.p <= r.threshold * (1.0 + 1e-12);
  return r;
}

inline CriterionReport check_criterion(const Instance& inst, double delta) {
  return check_criterion(inst.d(), inst.p(), delta);
}

}  // namespace lll
