// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "lll/instance.hpp"
#include "lll/randomness.hpp"

namespace lll {

/// The sequence S_1, ..., S_T of resampled independent sets.
struct ExecutionLog {
  std::vector<std::vector<EventId>> steps;  // steps[t - 1] is S_t, sorted
  std::vector<std::uint32_t> resample_counts;  // per variable
  bool terminated = false;

  [[nodiscard]] std::size_t total_steps() const noexcept { return steps.size(); }
  [[nodiscard]] const std::vector<EventId>& at(std::size_t t) const { return steps.at(t - 1); }
  [[nodiscard]] std::size_t resample_total() const {
    std::size_t total = 0;
    for (const auto& s : steps) total += s.size();
    return total;
  }
};

/// Per-variable table index: variable x currently takes x_{index[x]}.
using AssignmentView = std::vector<std::uint32_t>;

template <ValueSource Source>
inline bool event_holds(const Instance& inst, const Source& src, const AssignmentView& view, EventId e) {
  const auto& ev = inst.event(e);
  std::array<Value, kMaxEventVars> buf{};
  for (std::size_t i = 0; i < ev.vars.size(); ++i) buf[i] = src.value(ev.vars[i], view[ev.vars[i]]);
  return ev.holds(std::span<const Value>(buf.data(), ev.vars.size()));
}

/// From-scratch evaluation of every event under the view.
template <ValueSource Source>
std::vector<EventId> satisfied_events(const Instance& inst, const AssignmentView& view, const Source& src) {
  std::vector<EventId> out;
  for (EventId e = 0; e < inst.n(); ++e)
    if (event_holds(inst, src, view, e)) out.push_back(e);
  return out;
}

/// Events of `satisfied` with no satisfied neighbor of lower id.
inline std::vector<EventId> locally_minimal(std::span<const EventId> satisfied, const DependencyGraph& g) {
  std::vector<char> sat(g.size(), 0);
  for (EventId v : satisfied) sat[v] = 1;
  std::vector<EventId> out;
  for (EventId v : satisfied) {
    bool minimal = true;
    for (EventId u : g.neighbors(v)) {
      if (u >= v) break;
      if (sat[u]) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Live state of the resampler with incrementally maintained satisfied set.
template <ValueSource Source>
class CpsState {
 public:
  CpsState(const Instance& inst, const Source& src)
      : inst_(&inst), src_(&src), view_(inst.num_vars(), 0), sat_(inst.n(), 0), pos_(inst.n(), 0) {
    for (EventId e = 0; e < inst.n(); ++e) reevaluate(e);
  }

  [[nodiscard]] const AssignmentView& view() const noexcept { return view_; }
  [[nodiscard]] bool satisfied(EventId e) const { return sat_[e] != 0; }
  [[nodiscard]] bool any_satisfied() const noexcept { return !sat_list_.empty(); }
  [[nodiscard]] std::size_t steps_taken() const noexcept { return steps_; }

  [[nodiscard]] std::vector<EventId> satisfied_set() const {
    std::vector<EventId> out(sat_list_);
    std::sort(out.begin(), out.end());
    return out;
  }

  [[nodiscard]] Value value(VarId x) const { return src_->value(x, view_[x]); }

  [[nodiscard]] std::vector<Value> assignment() const {
    std::vector<Value> out(view_.size());
    for (VarId x = 0; x < view_.size(); ++x) out[x] = value(x);
    return out;
  }

  /// Satisfied events with no satisfied neighbor of lower id. With a mask,
  /// only masked-in events take part, as if the rest of the graph were absent.
  [[nodiscard]] std::vector<EventId> resample_set(const std::vector<char>* eligible = nullptr) const {
    std::vector<EventId> chosen;
    const auto& g = inst_->graph();
    for (EventId v : sat_list_) {
      if (eligible && !(*eligible)[v]) continue;
      bool minimal = true;
      for (EventId u : g.neighbors(v)) {
        if (u >= v) break;
        if (sat_[u] && (!eligible || (*eligible)[u])) {
          minimal = false;
          break;
        }
      }
      if (minimal) chosen.push_back(v);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  /// Resamples every variable of the given independent set.
  void resample(std::span<const EventId> set) {
    for (EventId v : set)
      for (VarId x : inst_->event(v).vars) ++view_[x];
    for (EventId v : set)
      for (VarId x : inst_->event(v).vars)
        for (EventId e : inst_->events_of(x)) reevaluate(e);
    ++steps_;
  }

  std::vector<EventId> step(const std::vector<char>* eligible = nullptr) {
    auto set = resample_set(eligible);
    resample(set);
    return set;
  }

 private:
  void reevaluate(EventId e) {
    const bool now = event_holds(*inst_, *src_, view_, e);
    if (now == static_cast<bool>(sat_[e])) return;
    if (now) {
      pos_[e] = sat_list_.size();
      sat_list_.push_back(e);
    } else {
      const EventId last = sat_list_.back();
      sat_list_[pos_[e]] = last;
      pos_[last] = pos_[e];
      sat_list_.pop_back();
    }
    sat_[e] = now;
  }

  const Instance* inst_;
  const Source* src_;
  AssignmentView view_;
  std::vector<char> sat_;
  std::vector<std::size_t> pos_;
  std::vector<EventId> sat_list_;
  std::size_t steps_ = 0;
};

struct CpsResult {
  ExecutionLog log;
  std::vector<Value> final_assignment;
  AssignmentView final_view;
};

/// Step cap used when callers do not pass one: 50 log_{1/p} n, at least 64.
inline std::size_t default_max_steps(const Instance& inst) {
  return std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(50.0 * inst.log_inv_p_n())));
}

/// Runs the resampler until no event is satisfied or `max_steps` steps have
/// been taken. Hitting the cap is recorded in `log.terminated`, not thrown.
template <ValueSource Source>
CpsResult run_cps(const Instance& inst, const Source& src, std::size_t max_steps) {
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  CpsState<Source> state(inst, src);
  CpsResult r;
  while (state.any_satisfied() && state.steps_taken() < max_steps) r.log.steps.push_back(state.step());
  r.log.terminated = !state.any_satisfied();
  r.log.resample_counts = state.view();
  r.final_view = state.view();
  r.final_assignment = state.assignment();
  return r;
}

template <ValueSource Source>
CpsResult run_cps(const Instance& inst, const Source& src) {
  return run_cps(inst, src, default_max_steps(inst));
}

/// Number of steps s <= t whose resampled set touches variable x.
inline std::uint32_t value_index_at(const Instance& inst, const ExecutionLog& log, VarId x, std::size_t t) {
  if (t > log.total_steps()) throw ValidationError("step index beyond the log");
  const auto users = inst.events_of(x);
  std::uint32_t count = 0;
  for (std::size_t s = 1; s <= t; ++s) {
    const auto& set = log.at(s);
    for (EventId e : users) {
      if (std::binary_search(set.begin(), set.end(), e)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

/// Table indices after the first t steps of the log.
inline AssignmentView replay_view(const Instance& inst, const ExecutionLog& log, std::size_t t) {
  AssignmentView view(inst.num_vars(), 0);
  for (std::size_t s = 1; s <= t; ++s)
    for (EventId e : log.at(s))
      for (VarId x : inst.event(e).vars) ++view[x];
  return view;
}

/// 64-bit FNV-1a over the assignment values.
inline std::uint64_t assignment_digest(std::span<const Value> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Value v : values) {
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline nlohmann::ordered_json run_report(std::uint64_t seed, const CpsResult& r) {
  std::vector<std::size_t> sizes;
  sizes.reserve(r.log.total_steps());
  for (const auto& s : r.log.steps) sizes.push_back(s.size());
  return nlohmann::ordered_json{{"seed", seed},
                                {"T", r.log.total_steps()},
                                {"terminated", r.log.terminated},
                                {"resample_total", r.log.resample_total()},
                                {"per_step_sizes", sizes},
                                {"final_assignment_digest", hex64(assignment_digest(r.final_assignment))}};
}

}  // namespace lll
