// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lll/classify.hpp"
#include "lll/enumerate.hpp"
#include "lll/generators.hpp"
#include "lll/instance_io.hpp"
#include "lll/lca.hpp"
#include "lll/localsim.hpp"
#include "lll/montecarlo.hpp"
#include "lll/resampler.hpp"
#include "lll/witness.hpp"

namespace lll {

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s{"trees", "probability", "classification", "lca", "local"};
  return s;
}

/// Where an experiment's instance comes from: a file, or a generator whose
/// seed is taken from the run seed.
struct InstanceSpec {
  std::string file;
  std::string generator = "ksat";  // ksat | coloring
  std::uint32_t size = 2000;       // clauses or hyperedges
  std::uint32_t k = 10;            // clause width or edge size
  std::uint32_t occurrence = 2;    // max occurrence or max vertex degree
  std::uint32_t colors = 2;

  [[nodiscard]] Instance make(std::uint64_t seed) const {
    if (!file.empty()) return load_instance(file);
    if (generator == "ksat") return gen_ksat(size, k, occurrence, seed);
    if (generator == "coloring") return gen_hypergraph_coloring(size, k, occurrence, colors, seed);
    throw ValidationError("unknown generator '" + generator + "'");
  }
};

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<std::uint64_t> seeds{0};
  ParamOverrides params;
  std::size_t max_steps = 0;  // 0: default cap
  std::vector<std::string> suites = known_suites();
  std::string output_dir;

  void validate() const {
    if (seeds.empty()) throw ValidationError("config needs at least one seed");
    for (const auto& s : suites)
      if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end())
        throw ValidationError("unknown suite '" + s + "'");
    if (params.eps && !(*params.eps > 0.0 && *params.eps < 0.1)) throw ValidationError("eps must lie in (0, 0.1)");
    if (params.ell && !(*params.ell > 0.0)) throw ValidationError("ell override must be positive");
    if (!output_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(output_dir, ec);
      const auto probe = std::filesystem::path(output_dir) / ".write_probe";
      std::ofstream f(probe);
      if (!f) throw ValidationError("output directory '" + output_dir + "' is not writable");
      f.close();
      std::filesystem::remove(probe, ec);
    }
  }
  [[nodiscard]] bool wants(const std::string& suite) const {
    return std::find(suites.begin(), suites.end(), suite) != suites.end();
  }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("instance")) {
      const auto& i = j.at("instance");
      c.instance.file = i.value("file", "");
      c.instance.generator = i.value("generator", c.instance.generator);
      c.instance.size = i.value("size", c.instance.size);
      c.instance.k = i.value("k", c.instance.k);
      c.instance.occurrence = i.value("occurrence", c.instance.occurrence);
      c.instance.colors = i.value("colors", c.instance.colors);
    }
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("params")) {
      const auto& p = j.at("params");
      if (p.contains("eps")) c.params.eps = p.at("eps").get<double>();
      if (p.contains("ell")) c.params.ell = p.at("ell").get<double>();
      c.max_steps = p.value("max_steps", std::size_t{0});
    }
    if (j.contains("suites")) c.suites = j.at("suites").get<std::vector<std::string>>();
    c.output_dir = j.value("output_dir", "");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

/// Worker count: hardware concurrency, capped by LLL_LAB_THREADS when set.
inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LLL_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return n;
}

/// fn(0..count-1) on the worker pool; results come back in index order, so
/// merges are independent of scheduling.
template <class F>
auto parallel_map(std::size_t count, F fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<std::optional<R>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i; (i = next++) < count;) {
      if (failed) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Verification suites

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  bool skipped = false;
  std::vector<std::string> notes{};

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++failures;
      if (notes.size() < 20) notes.push_back(what);
    }
  }
  void merge(const SuiteResult& o) {
    checks += o.checks;
    failures += o.failures;
    skipped = skipped && o.skipped;
    for (const auto& n : o.notes)
      if (notes.size() < 20) notes.push_back(n);
  }
  [[nodiscard]] bool passed() const { return failures == 0; }
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  std::size_t runs = 0;
  std::size_t non_terminated = 0;
  std::size_t fallback_runs = 0;

  [[nodiscard]] bool passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const auto& s) { return s.passed(); });
  }
};

inline constexpr std::size_t kMaxVerifyQueries = 2000;
inline constexpr std::uint32_t kMonteCarloInstanceLimit = 64;
inline constexpr std::size_t kVerifyTrials = 20000;

namespace detail {

inline std::string where(std::uint64_t seed, EventId v, std::size_t t) {
  return "seed " + std::to_string(seed) + " root (" + std::to_string(v) + ", " + std::to_string(t) + ")";
}

inline SuiteResult verify_trees(const Instance& inst, std::uint64_t seed, const CpsResult& run) {
  SuiteResult r{"trees"};
  const auto& log = run.log;
  WitnessBuilder builder(inst.graph(), log);
  for (std::size_t t = 1; t <= log.total_steps(); ++t) {
    for (EventId v : log.at(t)) {
      const auto tree = builder.build_occurring(v, t);
      r.check(tree.depth() == t - 1 && tree.size() >= t && tree.g_radius() <= 2 * (t - 1),
              "shape at " + where(seed, v, t));
      bool spec_ok = true;
      for (std::size_t i = 0; i < tree.size(); ++i) {
        const auto& node = tree.nodes()[i];
        for (VarId x : inst.event(node.event).vars)
          spec_ok = spec_ok && value_index_in_tree(inst, tree, i, x) == value_index_at(inst, log, x, node.step);
      }
      r.check(spec_ok, "value index at " + where(seed, v, t));
    }
  }
  const auto& g = inst.graph();
  if (g.max_degree() <= 3 && inst.n() <= kMonteCarloInstanceLimit) {
    for (std::size_t k = 1; k <= 4; ++k) {
      TreeEnumerator en(g, k);
      for (EventId v = 0; v < inst.n(); ++v)
        r.check(static_cast<double>(en.count(v)) < tree_count_bound(g.max_degree(), k),
                "tree count at event " + std::to_string(v) + " size " + std::to_string(k));
    }
  }
  return r;
}

inline SuiteResult verify_probability(const Instance& inst, std::uint64_t seed) {
  SuiteResult r{"probability"};
  if (inst.n() > kMonteCarloInstanceLimit) {
    r.skipped = true;
    r.notes.push_back("instance larger than " + std::to_string(kMonteCarloInstanceLimit) + " events");
    return r;
  }
  const auto& g = inst.graph();
  std::vector<TreeTarget> targets;
  const EventId root = static_cast<EventId>(seed % inst.n());
  std::vector<AbstractTree> shapes{{{root}, {-1}}, {{root, root}, {-1, 0}}};
  for (EventId u : g.neighbors(root)) shapes.push_back({{root, u}, {-1, 0}});
  for (const auto& s : shapes) {
    targets.push_back({make_target(g, s), false});
    targets.push_back({make_target(g, s), true});
  }
  const auto est = mc_tree_frequencies(inst, targets, kVerifyTrials, combine_seed(seed, 0x70b));
  for (std::size_t i = 0; i < est.size(); ++i)
    r.check(est[i].within_bound(), "tree " + targets[i].tree.canonical_shape() +
                                       (targets[i].possible ? " (possible)" : "") + " exceeds its bound");
  return r;
}

inline SuiteResult verify_classification(const Instance& inst, const ClassificationAnalysis& a) {
  SuiteResult r{"classification"};
  const auto& c = a.classification;
  r.check(a.certificates_valid, "certificate failed re-verification");
  r.check(a.ruling_set_valid, "ruling set failed BFS re-check");
  r.check(a.decomposition_valid, "decomposition has adjacent same-colour clusters");
  for (const auto& cert : c.certificates)
    r.check(cert.R <= c.params.R_max && cert.size >= c.params.size_threshold &&
                is_narrow(cert.size, cert.boundary, c.params.eps),
            "certificate of event " + std::to_string(cert.event) + " out of range");
  for (EventId v = 0; v < inst.n(); ++v) {
    bool expect = c.is_risky(v);
    for (EventId u : inst.graph().neighbors(v)) expect = expect || c.is_risky(u);
    r.check(c.is_insecure(v) == expect, "insecure closure at event " + std::to_string(v));
  }
  std::size_t covered = 0;
  for (const auto& comp : a.subgraph.components) {
    covered += comp.nodes.size();
    r.check(is_connected_subset(inst.graph(), comp.nodes), "disconnected component");
  }
  r.check(covered == a.subgraph.nodes.size(), "components do not partition the insecure set");
  return r;
}

inline SuiteResult verify_local(const MetaResult& m) {
  SuiteResult r{"local"};
  const auto& rep = m.report;
  const auto& cls = m.analysis.classification;
  r.check(rep.node_averaged <= rep.worst_case, "node-averaged above worst case");
  r.check(rep.node_averaged == node_averaged(rep.rounds), "node-averaged is not the mean");
  for (EventId v = 0; v < rep.rounds.size(); ++v) {
    r.check(rep.rounds[v] >= rep.secure_round, "round below the secure round");
    if (!rep.fallback_used && !cls.is_insecure(v))
      r.check(rep.rounds[v] == rep.secure_round, "secure node charged extra rounds");
  }
  if (!rep.fallback_used && rep.terminated) r.check(rep.matches_global, "output differs from the global run");
  return r;
}

inline SuiteResult verify_lca(const Instance& inst, LcaSession& s) {
  SuiteResult r{"lca"};
  if (s.fallback_run()) {
    r.notes.push_back("fallback run: answers come from the global run");
    return r;
  }
  const std::size_t stride = std::max<std::size_t>(1, inst.n() / kMaxVerifyQueries);
  for (EventId v = 0; v < inst.n(); v += static_cast<EventId>(stride)) {
    LcaAnswer a;
    try {
      a = s.query(v);
    } catch (const VolumeViolation& e) {
      r.check(false, e.what());
      continue;
    }
    r.check(a.matches_global || a.fallback, "query " + std::to_string(v) + " disagrees with the global run");
    r.check(a.schedule_ok, "staggered schedule unsound at query " + std::to_string(v));
    r.check(a.stats.probes >= a.stats.explored_nodes && a.stats.component_size <= a.stats.explored_nodes,
            "probe accounting at query " + std::to_string(v));
  }
  return r;
}

struct SeedOutcome {
  std::vector<SuiteResult> suites;
  bool terminated = true;
  bool fallback = false;
};

}  // namespace detail

inline VerifyReport run_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto outcomes = parallel_map(cfg.seeds.size(), [&](std::size_t i) {
    const auto seed = cfg.seeds[i];
    const auto inst = cfg.instance.make(seed);
    detail::SeedOutcome out;
    LcaOptions opt;
    opt.volume_mode = true;
    opt.full_schedule_check = true;
    opt.max_steps = cfg.max_steps;
    LcaSession session(inst, seed, cfg.params, opt);
    const auto& meta = session.meta();
    out.terminated = meta.global.log.terminated;
    out.fallback = session.fallback_run();
    for (const auto& name : known_suites()) {
      if (!cfg.wants(name)) continue;
      if (name == "trees") out.suites.push_back(detail::verify_trees(inst, seed, meta.global));
      if (name == "probability") out.suites.push_back(detail::verify_probability(inst, seed));
      if (name == "classification") out.suites.push_back(detail::verify_classification(inst, meta.analysis));
      if (name == "lca") out.suites.push_back(detail::verify_lca(inst, session));
      if (name == "local") out.suites.push_back(detail::verify_local(meta));
    }
    return out;
  });
  VerifyReport rep;
  for (const auto& o : outcomes) {
    ++rep.runs;
    rep.non_terminated += !o.terminated;
    rep.fallback_runs += o.fallback;
    for (std::size_t k = 0; k < o.suites.size(); ++k) {
      if (rep.suites.size() <= k) {
        rep.suites.push_back(o.suites[k]);
      } else {
        rep.suites[k].merge(o.suites[k]);
      }
    }
  }
  return rep;
}

inline nlohmann::ordered_json to_json(const VerifyReport& r) {
  nlohmann::ordered_json suites = nlohmann::ordered_json::object();
  for (const auto& s : r.suites)
    suites[s.name] = {{"passed", s.passed()},
                      {"skipped", s.skipped},
                      {"checks", s.checks},
                      {"failures", s.failures},
                      {"notes", s.notes}};
  return {{"passed", r.passed()},
          {"runs", r.runs},
          {"non_terminated", r.non_terminated},
          {"fallback_runs", r.fallback_runs},
          {"suites", std::move(suites)}};
}

// ---------------------------------------------------------------------------
// Sweeps

/// One sweep row. The CSV carries the first nine fields; the rest feed
/// checks that need more than the published columns.
struct SweepRow {
  std::string param;
  double T_mean = 0.0;
  double node_avg = 0.0;
  double worst_case = 0.0;
  double insecure_frac = 0.0;
  std::size_t max_component = 0;
  std::size_t probes_p50 = 0;
  std::size_t probes_max = 0;
  double e_good_rate = 0.0;

  double insecure_frac_se = 0.0;
  double log_n = 0.0;            ///< log_{1/p} n of the first instance
  std::uint32_t max_diameter = 0;
  double fallback_rate = 0.0;
  bool node_avg_le_worst = true;  ///< held in every run
  bool probe_bound_ok = true;     ///< every query's probes within the summed-ball bound
  std::size_t runs = 0;
  std::size_t queries = 0;
};

struct SweepSpec {
  std::string param = "p";  // p | n | d | seeds
  std::vector<std::string> values;
  InstanceSpec base;
  std::vector<std::uint64_t> seeds{0};
  ParamOverrides params;
  std::size_t queries = 100;  ///< sampled queries per run
  std::size_t max_steps = 0;
};

namespace detail {

/// "2^-8", "0.00390625" or "1/256".
inline double parse_probability(const std::string& s) {
  try {
    std::size_t used = 0;
    if (s.rfind("2^", 0) == 0) {
      const int e = std::stoi(s.substr(2), &used);
      if (used != s.size() - 2) throw ValidationError("");
      return std::ldexp(1.0, e);
    }
    if (const auto slash = s.find('/'); slash != std::string::npos)
      return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse probability '" + s + "'");
  }
}

inline std::uint32_t parse_count(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size() && v >= 1) return static_cast<std::uint32_t>(v);
  } catch (const std::exception&) {
  }
  throw ValidationError(std::string("cannot parse ") + what + " '" + s + "'");
}

inline InstanceSpec apply_sweep_value(InstanceSpec spec, const std::string& param, const std::string& value) {
  if (param == "seeds") return spec;
  if (!spec.file.empty()) throw ValidationError("sweeping " + param + " needs a generated instance");
  if (param == "n") {
    spec.size = parse_count(value, "n");
  } else if (param == "p") {
    if (spec.generator != "ksat") throw ValidationError("sweeping p needs the ksat generator");
    const double p = parse_probability(value);
    const double k = -std::log2(p);
    if (!(p > 0.0 && p < 1.0) || std::abs(k - std::round(k)) > 1e-9)
      throw ValidationError("k-SAT sweeps need p = 2^-k, got '" + value + "'");
    spec.k = static_cast<std::uint32_t>(std::round(k));
  } else if (param == "d") {
    // Occurrence bound o gives d <= k (o - 1).
    spec.occurrence = parse_count(value, "d") / spec.k + 1;
  } else {
    throw ValidationError("unknown sweep parameter '" + param + "'");
  }
  return spec;
}

struct RunSample {
  double T = 0, node_avg = 0, worst = 0, insecure = 0, log_n = 0;
  std::size_t max_component = 0;
  std::uint32_t max_diameter = 0;
  bool e_good = true, fallback = false, avg_le_worst = true, probe_ok = true;
  std::vector<std::size_t> probes;
};

inline RunSample sweep_run(const InstanceSpec& spec, std::uint64_t seed, const ParamOverrides& ov,
                           std::size_t queries, std::size_t max_steps) {
  const auto inst = spec.make(seed);
  LcaOptions opt;
  opt.max_steps = max_steps;
  LcaSession s(inst, seed, ov, opt);
  const auto& m = s.meta();
  RunSample out;
  out.T = static_cast<double>(m.report.global_steps);
  out.node_avg = m.report.node_averaged;
  out.worst = m.report.worst_case;
  out.insecure = m.report.insecure_fraction;
  out.log_n = inst.log_inv_p_n();
  out.e_good = m.report.e_good;
  out.fallback = s.fallback_run();
  out.avg_le_worst = m.report.node_averaged <= m.report.worst_case;
  for (const auto& c : m.analysis.subgraph.components) {
    out.max_component = std::max(out.max_component, c.nodes.size());
    out.max_diameter = std::max(out.max_diameter, c.diameter);
  }
  const std::uint32_t wide = 2 * s.params().R_max + 2;
  std::vector<std::int64_t> ball_size(inst.n(), -1);
  Bfs bfs(inst.graph());
  SplitMix pick(combine_seed(seed, 0x9e7));
  for (std::size_t q = 0; q < queries; ++q) {
    const auto v = static_cast<EventId>(pick.below(inst.n()));
    const auto a = s.query(v);
    out.probes.push_back(a.stats.probes);
    std::size_t bound = 0;
    for (EventId u : s.source_set(v)) {
      if (ball_size[u] < 0) {
        bfs.run(u, wide);
        ball_size[u] = static_cast<std::int64_t>(bfs.order().size());
      }
      bound += static_cast<std::size_t>(ball_size[u]);
    }
    out.probe_ok = out.probe_ok && a.stats.probes <= bound;
  }
  return out;
}

}  // namespace detail

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw ValidationError("sweep needs at least one value");
  if (spec.param != "seeds" && spec.seeds.empty()) throw ValidationError("sweep needs at least one seed");
  struct Job {
    std::size_t row;
    InstanceSpec inst;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < spec.values.size(); ++r) {
    const auto inst = detail::apply_sweep_value(spec.base, spec.param, spec.values[r]);
    std::vector<std::uint64_t> seeds = spec.seeds;
    if (spec.param == "seeds") {
      seeds.clear();
      for (std::uint32_t s = 0; s < detail::parse_count(spec.values[r], "seed count"); ++s) seeds.push_back(s);
    }
    for (auto s : seeds) jobs.push_back({r, inst, s});
  }
  const auto samples = parallel_map(jobs.size(), [&](std::size_t i) {
    return detail::sweep_run(jobs[i].inst, jobs[i].seed, spec.params, spec.queries, spec.max_steps);
  });

  std::vector<SweepRow> rows(spec.values.size());
  std::vector<std::vector<std::size_t>> probes(rows.size());
  std::vector<std::vector<double>> insecure(rows.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& row = rows[jobs[i].row];
    const auto& s = samples[i];
    if (row.runs == 0) row.log_n = s.log_n;
    ++row.runs;
    row.T_mean += s.T;
    row.node_avg += s.node_avg;
    row.worst_case += s.worst;
    row.e_good_rate += s.e_good;
    row.fallback_rate += s.fallback;
    row.max_component = std::max(row.max_component, s.max_component);
    row.max_diameter = std::max(row.max_diameter, s.max_diameter);
    row.node_avg_le_worst = row.node_avg_le_worst && s.avg_le_worst;
    row.probe_bound_ok = row.probe_bound_ok && s.probe_ok;
    insecure[jobs[i].row].push_back(s.insecure);
    probes[jobs[i].row].insert(probes[jobs[i].row].end(), s.probes.begin(), s.probes.end());
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    row.param = spec.values[r];
    const double k = static_cast<double>(row.runs);
    row.T_mean /= k;
    row.node_avg /= k;
    row.worst_case /= k;
    row.e_good_rate /= k;
    row.fallback_rate /= k;
    double mean = 0.0, var = 0.0;
    for (double x : insecure[r]) mean += x;
    mean /= k;
    for (double x : insecure[r]) var += (x - mean) * (x - mean);
    row.insecure_frac = mean;
    row.insecure_frac_se = row.runs > 1 ? std::sqrt(var / (k - 1) / k) : 0.0;
    auto& p = probes[r];
    row.queries = p.size();
    if (!p.empty()) {
      std::sort(p.begin(), p.end());
      row.probes_p50 = p[(p.size() - 1) / 2];
      row.probes_max = p.back();
    }
  }
  return rows;
}

/// RFC 4180 field: quoted when it holds a comma, quote or line break.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

inline const char* kSweepHeader =
    "param,T_mean,node_avg,worst_case,insecure_frac,max_component,probes_p50,probes_max,e_good_rate";

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << kSweepHeader << "\r\n";
  for (const auto& r : rows)
    os << csv_field(r.param) << ',' << format_number(r.T_mean) << ',' << format_number(r.node_avg) << ','
       << format_number(r.worst_case) << ',' << format_number(r.insecure_frac) << ',' << r.max_component << ','
       << r.probes_p50 << ',' << r.probes_max << ',' << format_number(r.e_good_rate) << "\r\n";
  return os.str();
}

}  // namespace lll
