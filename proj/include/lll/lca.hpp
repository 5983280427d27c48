// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "lll/classify.hpp"
#include "lll/localsim.hpp"
#include "lll/randomness.hpp"
#include "lll/resampler.hpp"
#include "lll/witness.hpp"

namespace lll {

/// Algorithm 1 on a probed region around a source set S with the staggered
/// schedule: a node at G-distance i from S takes part in steps
/// t <= horizon - floor(i/2). Scratch arrays are sized to the whole instance
/// and reset through touched lists, so one simulator serves many queries.
template <ValueSource Source>
class RegionSimulator {
 public:
  RegionSimulator(const Instance& inst, const Source& src)
      : inst_(&inst), src_(&src), bfs_(inst.graph()), limit_(inst.n(), 0), in_region_(inst.n(), 0),
        sat_(inst.n(), 0), eligible_(inst.n(), 0), pos_(inst.n(), 0), view_(inst.num_vars(), 0) {}

  /// Probes ball(S, radius) and simulates `horizon` staggered steps.
  void run(std::span<const EventId> sources, std::uint32_t horizon, std::uint32_t radius,
           bool full_schedule_check = false) {
    reset();
    bfs_.run(sources, radius);
    region_ = bfs_.order();
    for (EventId u : region_) {
      in_region_[u] = 1;
      const auto i = bfs_.distance(u);
      limit_[u] = horizon >= i / 2 ? horizon - i / 2 : 0;
      for (VarId x : inst_->event(u).vars) touched_vars_.push_back(x);
    }
    // Soundness of the schedule: every node that simulates a step must see
    // its whole 2-hop neighbourhood inside the region. That holds when the
    // deepest such node sits two hops inside the radius, or when the BFS ran
    // out of graph before reaching the radius.
    std::uint32_t deepest = 0, far = 0;
    for (EventId u : region_) {
      far = std::max(far, bfs_.distance(u));
      if (limit_[u] >= 1) deepest = std::max(deepest, bfs_.distance(u));
    }
    schedule_ok_ = deepest + 2 <= radius || far < radius;
    if (full_schedule_check) schedule_ok_ = schedule_ok_ && check_schedule();
    for (EventId u : region_) reevaluate(u);
    log_.steps.clear();
    for (std::uint32_t s = 1; s <= horizon; ++s) {
      std::vector<EventId> chosen;
      for (EventId u : sat_list_) {
        if (limit_[u] < s || !minimal(u, nullptr)) continue;
        chosen.push_back(u);
      }
      // A step that changes nothing leaves every later step empty too.
      if (chosen.empty()) break;
      std::sort(chosen.begin(), chosen.end());
      apply(chosen);
      log_.steps.push_back(std::move(chosen));
    }
  }

  /// Continues with only `members` allowed to resample, until none of them
  /// is satisfied. Returns false if some event of `watched` outside
  /// `members` becomes satisfied (the local run can no longer be trusted) or
  /// the step cap is hit.
  bool run_restricted(std::span<const EventId> members, std::span<const EventId> watched, std::size_t cap) {
    restricted_steps_ = 0;
    for (EventId u : members) eligible_[u] = 1;
    const bool ok = restricted_loop(watched, cap);
    for (EventId u : members) eligible_[u] = 0;
    return ok;
  }

  [[nodiscard]] const std::vector<EventId>& region() const noexcept { return region_; }
  [[nodiscard]] std::uint32_t dist(EventId u) const { return bfs_.distance(u); }
  [[nodiscard]] std::uint32_t limit(EventId u) const { return limit_[u]; }
  [[nodiscard]] bool satisfied(EventId u) const { return sat_[u] != 0; }
  [[nodiscard]] Value value(VarId x) const { return src_->value(x, view_[x]); }
  [[nodiscard]] const ExecutionLog& log() const noexcept { return log_; }
  [[nodiscard]] bool schedule_ok() const noexcept { return schedule_ok_; }
  [[nodiscard]] std::size_t restricted_steps() const noexcept { return restricted_steps_; }

 private:
  void reset() {
    for (EventId u : region_) {
      in_region_[u] = 0;
      sat_[u] = 0;
      limit_[u] = 0;
    }
    for (VarId x : touched_vars_) view_[x] = 0;
    touched_vars_.clear();
    sat_list_.clear();
    region_.clear();
    restricted_steps_ = 0;
  }

  bool restricted_loop(std::span<const EventId> watched, std::size_t cap) {
    while (true) {
      for (EventId u : watched)
        if (sat_[u] && !eligible_[u]) return false;
      std::vector<EventId> chosen;
      for (EventId u : sat_list_)
        if (eligible_[u] && minimal(u, &eligible_)) chosen.push_back(u);
      if (chosen.empty()) return true;
      if (restricted_steps_ >= cap) return false;
      std::sort(chosen.begin(), chosen.end());
      apply(chosen);
      ++restricted_steps_;
    }
  }

  bool check_schedule() const {
    const auto& g = inst_->graph();
    for (EventId u : region_) {
      if (limit_[u] == 0) continue;
      auto ok = [&](EventId w) { return in_region_[w] && limit_[w] + 1 >= limit_[u]; };
      for (EventId w : g.neighbors(u)) {
        if (!ok(w)) return false;
        for (EventId x : g.neighbors(w))
          if (!ok(x)) return false;
      }
    }
    return true;
  }

  bool minimal(EventId u, const std::vector<char>* eligible) const {
    for (EventId w : inst_->graph().neighbors(u)) {
      if (w >= u) break;
      if (in_region_[w] && sat_[w] && (!eligible || (*eligible)[w])) return false;
    }
    return true;
  }

  void apply(std::span<const EventId> chosen) {
    for (EventId u : chosen)
      for (VarId x : inst_->event(u).vars) ++view_[x];
    for (EventId u : chosen)
      for (VarId x : inst_->event(u).vars)
        for (EventId e : inst_->events_of(x))
          if (in_region_[e]) reevaluate(e);
  }

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
  Bfs bfs_;
  std::vector<EventId> region_;
  std::vector<std::uint32_t> limit_;
  std::vector<char> in_region_;
  std::vector<char> sat_;
  std::vector<char> eligible_;
  std::vector<std::size_t> pos_;
  std::vector<EventId> sat_list_;
  AssignmentView view_;
  std::vector<VarId> touched_vars_;
  ExecutionLog log_;
  std::size_t restricted_steps_ = 0;
  bool schedule_ok_ = true;
};

struct ProbeStats {
  std::size_t probes = 0;          ///< distinct nodes probed
  std::size_t explored_nodes = 0;  ///< nodes popped from the exploration stack
  std::size_t component_size = 0;  ///< |S| when the query is insecure, else 0
  std::size_t rounds_simulated = 0;
};

struct LcaAnswer {
  EventId node = 0;
  std::vector<VarId> vars;
  std::vector<Value> values;
  ProbeStats stats;
  bool fallback = false;        ///< answered from the global run
  bool matches_global = true;   ///< values agree with the global run
  bool schedule_ok = true;
  bool connected = true;        ///< probed region induces a connected subgraph
};

struct LcaOptions {
  bool volume_mode = false;
  bool memoize = false;  ///< charge each node once per session instead of once per query
  bool full_schedule_check = false;
  std::size_t max_steps = 0;  ///< cap for the reference run; 0 picks the default
};

class VolumeViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Aggregate probe accounting over the queries of one session.
struct ProbeLedger {
  std::vector<std::size_t> charged;  // per query, in query order
  std::size_t total = 0;
  std::size_t max = 0;
  std::size_t queries = 0;

  [[nodiscard]] std::size_t p50() const {
    if (charged.empty()) return 0;
    auto v = charged;
    std::nth_element(v.begin(), v.begin() + (v.size() - 1) / 2, v.end());
    return v[(v.size() - 1) / 2];
  }
};

/// Query answering in the probe model. The session samples the table, runs
/// the global resampler once (it is the reference the answers are checked
/// against and the source of the risky classification) and then answers each
/// query from its own probed neighbourhood.
class LcaSession {
 public:
  LcaSession(const Instance& inst, std::uint64_t seed, const ParamOverrides& ov = {}, LcaOptions opt = {})
      : inst_(&inst), params_(derive_params(inst, ov)), table_(sample_table(inst, seed)), opt_(opt),
        meta_(run_meta(inst, table_, params_, opt.max_steps ? opt.max_steps : default_max_steps(inst))),
        sim_(inst, table_),
        added_(inst.n(), 0), probed_(inst.n(), 0), charged_(opt.memoize ? inst.n() : 0, 0) {}

  [[nodiscard]] const NarrowParams& params() const noexcept { return params_; }
  [[nodiscard]] const RandomnessTable& table() const noexcept { return table_; }
  [[nodiscard]] const MetaResult& meta() const noexcept { return meta_; }
  [[nodiscard]] const Classification& classification() const noexcept { return meta_.analysis.classification; }
  [[nodiscard]] bool fallback_run() const noexcept { return meta_.report.fallback_used || !meta_.report.terminated; }
  [[nodiscard]] const ProbeLedger& ledger() const noexcept { return ledger_; }
  [[nodiscard]] std::uint32_t probe_radius() const noexcept { return params_.R_max + 2; }

  LcaAnswer query(EventId v) {
    if (v >= inst_->n()) throw ValidationError("query node out of range");
    const auto& cls = classification();
    const auto& g = inst_->graph();
    const std::uint32_t rho = probe_radius();
    LcaAnswer ans;
    ans.node = v;
    ans.vars = inst_->event(v).vars;

    // Exploration stack: every popped node has its rho-ball probed; insecure
    // nodes push their insecure neighbours.
    std::vector<EventId> stack{v}, S, probed, added{v};
    added_[v] = 1;
    Bfs bfs(g);
    while (!stack.empty()) {
      const EventId u = stack.back();
      stack.pop_back();
      ++ans.stats.explored_nodes;
      bfs.run(u, rho);
      for (EventId w : bfs.order())
        if (!probed_[w]) {
          probed_[w] = 1;
          probed.push_back(w);
        }
      if (!cls.is_insecure(u)) continue;
      S.push_back(u);
      for (EventId w : g.neighbors(u))
        if (cls.is_insecure(w) && !added_[w]) {
          added_[w] = 1;
          added.push_back(w);
          stack.push_back(w);
        }
    }
    for (EventId w : added) added_[w] = 0;
    for (EventId w : probed) probed_[w] = 0;
    if (S.empty()) S.push_back(v);
    std::sort(S.begin(), S.end());
    ans.stats.probes = probed.size();
    ans.stats.component_size = cls.is_insecure(v) ? S.size() : 0;
    if (opt_.volume_mode) {
      ans.connected = is_connected_subset(g, probed);
      if (!ans.connected) throw VolumeViolation("probed region of query " + std::to_string(v) + " is disconnected");
    }

    const std::uint32_t H = params_.phase1_steps;
    sim_.run(S, H, rho, opt_.full_schedule_check);
    ans.schedule_ok = sim_.schedule_ok();
    bool trusted = true;
    if (cls.is_insecure(v)) {
      std::vector<EventId> members;
      for (EventId u : S)
        if (cls.is_risky(u)) members.push_back(u);
      const auto cap = opt_.max_steps ? opt_.max_steps : default_max_steps(*inst_);
      trusted = sim_.run_restricted(members, S, cap > H ? cap - H : 1);
    }
    ans.stats.rounds_simulated = H + sim_.restricted_steps();
    ans.fallback = fallback_run() || !trusted;
    const auto& global = meta_.global.final_assignment;
    for (VarId x : ans.vars) ans.values.push_back(ans.fallback ? global[x] : sim_.value(x));
    for (std::size_t i = 0; i < ans.vars.size(); ++i)
      ans.matches_global = ans.matches_global && ans.values[i] == global[ans.vars[i]];

    std::size_t charge = ans.stats.probes;
    if (opt_.memoize) {
      charge = 0;
      for (EventId w : probed)
        if (!charged_[w]) {
          charged_[w] = 1;
          ++charge;
        }
    }
    ledger_.charged.push_back(charge);
    ledger_.total += charge;
    ledger_.max = std::max(ledger_.max, charge);
    ++ledger_.queries;
    return ans;
  }

  /// The set S a query at v explores: v's insecure component, or {v}.
  [[nodiscard]] std::vector<EventId> source_set(EventId v) const {
    const auto& cls = classification();
    if (!cls.is_insecure(v)) return {v};
    const auto& sub = meta_.analysis.subgraph;
    return sub.components[sub.component_of[v]].nodes;
  }

 private:
  const Instance* inst_;
  NarrowParams params_;
  RandomnessTable table_;
  LcaOptions opt_;
  MetaResult meta_;
  RegionSimulator<RandomnessTable> sim_;
  std::vector<char> added_, probed_, charged_;
  ProbeLedger ledger_;
};

inline nlohmann::ordered_json to_json(const LcaAnswer& a) {
  return {{"node", a.node},
          {"vars", a.vars},
          {"values", a.values},
          {"probes", a.stats.probes},
          {"explored_nodes", a.stats.explored_nodes},
          {"component_size", a.stats.component_size},
          {"rounds_simulated", a.stats.rounds_simulated},
          {"fallback", a.fallback}};
}

/// One locality comparison: the risky flag of v recomputed from
/// ball(v, 2 R_max + 2) alone against the global flag.
struct LocalityCase {
  EventId node = 0;
  bool covered = true;  ///< every global resample of v falls inside the local horizon
  bool global_risky = false;
  bool local_risky = false;
  bool schedule_ok = true;

  [[nodiscard]] bool agrees() const { return global_risky == local_risky; }
};

/// The local run simulates R_max staggered steps around {v}. Events within
/// G-distance R_max of v are then exact through step ceil(R_max / 2), which
/// is everything an R-possible tree (R <= R_max) rooted at (v, t) reads for
/// t <= ceil(R_max / 2) + 1.
template <ValueSource Source>
LocalityCase locality_check(const Instance& inst, const ExecutionLog& global_log, const Classification& cls,
                            EventId v, RegionSimulator<Source>& sim) {
  const auto& P = cls.params;
  LocalityCase c;
  c.node = v;
  c.global_risky = cls.is_risky(v);
  const std::uint32_t horizon = P.R_max;
  const std::size_t t_max = (P.R_max + 1) / 2 + 1;
  for (std::size_t t = 1; t <= global_log.total_steps(); ++t) {
    const auto& s = global_log.at(t);
    if (t > t_max && std::binary_search(s.begin(), s.end(), v)) c.covered = false;
  }
  const EventId src[] = {v};
  sim.run(src, horizon, 2 * P.R_max + 2);
  c.schedule_ok = sim.schedule_ok();
  const auto& local = sim.log();
  WitnessBuilder builder(inst.graph(), local);
  for (std::size_t t = 1; t <= std::min(t_max, local.total_steps()) && !c.local_risky; ++t) {
    const auto& s = local.at(t);
    if (!std::binary_search(s.begin(), s.end(), v)) continue;
    c.local_risky = narrow_certificate(builder.profile(v, t, P.R_max), P).has_value();
  }
  return c;
}

}  // namespace lll
