// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lll/harness.hpp"

namespace lll {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitVerification = 3, kExitNonTermination = 4 };

namespace detail {

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

inline std::string pretty(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(s)) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw ValidationError("");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        std::size_t used = 0;
        out.push_back(std::stoull(item, &used));
        if (used != item.size()) throw ValidationError("");
      }
    } catch (const std::exception&) {
      throw ValidationError("bad seed list '" + s + "'");
    }
  }
  if (out.empty()) throw ValidationError("seed list is empty");
  return out;
}

struct ParamFlags {
  std::optional<double> eps, ell;
  std::size_t max_steps = 0;

  void add(CLI::App* app) {
    app->add_option("--eps", eps, "narrowness epsilon in (0, 0.1)");
    app->add_option("--ell", ell, "override for the derived ell");
    app->add_option("--max-steps", max_steps, "step cap for the resampler (0 = default)");
  }
  [[nodiscard]] ParamOverrides overrides() const { return {eps, ell}; }
};

}  // namespace detail

/// The whole command-line surface. Output goes to `out`, diagnostics to
/// `err`; the return value is the process exit code.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LLL resampling lab"};
  app.name("lll_lab");
  app.require_subcommand(1);
  int code = kExitOk;

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance");
  std::string gen_kind = "ksat", gen_out;
  std::uint32_t gen_size = 2000, gen_k = 10, gen_occ = 2, gen_colors = 2;
  std::uint64_t gen_seed = 0;
  bool gen_permute = false;
  gen->add_option("--kind", gen_kind, "ksat or coloring")->check(CLI::IsMember({"ksat", "coloring"}));
  gen->add_option("--size", gen_size, "clauses or hyperedges");
  gen->add_option("--k", gen_k, "clause width or edge size");
  gen->add_option("--occurrence", gen_occ, "max variable occurrence or vertex degree");
  gen->add_option("--colors", gen_colors, "colours for hypergraph colouring");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_flag("--permute-ids", gen_permute, "randomly permute event ids");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "run the resampler once");
  std::string run_instance, run_out, run_hist;
  std::uint64_t run_seed = 0;
  bool run_meta_flag = false;
  detail::ParamFlags run_params;
  run->add_option("--instance", run_instance, "instance file")->required();
  run->add_option("--seed", run_seed, "table seed");
  run->add_flag("--meta", run_meta_flag, "run the two-phase local algorithm and report rounds");
  run->add_option("--histogram", run_hist, "write the per-node round histogram CSV here (with --meta)");
  run->add_option("--out", run_out, "report file (default stdout)");
  run_params.add(run);

  // classify
  auto* cls = app.add_subcommand("classify", "classify risky and insecure events of one run");
  std::string cls_instance, cls_out;
  std::uint64_t cls_seed = 0;
  detail::ParamFlags cls_params;
  cls->add_option("--instance", cls_instance, "instance file")->required();
  cls->add_option("--seed", cls_seed, "table seed");
  cls->add_option("--out", cls_out, "report file (default stdout)");
  cls_params.add(cls);

  // query
  auto* query = app.add_subcommand("query", "answer one node query in the probe model");
  std::string q_instance, q_out;
  std::uint64_t q_seed = 0;
  EventId q_node = 0;
  bool q_volume = false;
  detail::ParamFlags q_params;
  query->add_option("--instance", q_instance, "instance file")->required();
  query->add_option("--seed", q_seed, "table seed");
  query->add_option("--node", q_node, "event id to query")->required();
  query->add_flag("--volume-mode", q_volume, "require a connected probed region");
  query->add_option("--out", q_out, "answer file (default stdout)");
  q_params.add(query);

  // verify
  auto* verify = app.add_subcommand("verify", "run invariant suites");
  std::string v_config, v_instance, v_seeds = "0", v_suites, v_out;
  detail::ParamFlags v_params;
  verify->add_option("--config", v_config, "experiment config (JSON)");
  verify->add_option("--instance", v_instance, "instance file");
  verify->add_option("--seeds", v_seeds, "seed list, e.g. 0,1,5-9");
  verify->add_option("--suites", v_suites, "subset of trees,probability,classification,lca,local");
  verify->add_option("--out", v_out, "report file (default stdout)");
  v_params.add(verify);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "vary one parameter and tabulate");
  std::string s_param = "p", s_values, s_seeds = "0-9", s_out, s_kind = "ksat", s_instance;
  std::uint32_t s_size = 2000, s_k = 10, s_occ = 2, s_colors = 2;
  std::size_t s_queries = 100;
  detail::ParamFlags s_params;
  sweep->add_option("--param", s_param, "p, n, d or seeds")->check(CLI::IsMember({"p", "n", "d", "seeds"}));
  sweep->add_option("--values", s_values, "comma-separated values, e.g. 2^-8,2^-12")->required();
  sweep->add_option("--seeds", s_seeds, "seed list");
  sweep->add_option("--instance", s_instance, "fixed instance file (only with --param seeds)");
  sweep->add_option("--kind", s_kind, "ksat or coloring")->check(CLI::IsMember({"ksat", "coloring"}));
  sweep->add_option("--size", s_size, "base clauses or hyperedges");
  sweep->add_option("--k", s_k, "base clause width or edge size");
  sweep->add_option("--occurrence", s_occ, "base occurrence bound");
  sweep->add_option("--colors", s_colors, "colours for hypergraph colouring");
  sweep->add_option("--queries", s_queries, "sampled queries per run");
  sweep->add_option("--out", s_out, "CSV file (default stdout)");
  s_params.add(sweep);

  std::vector<const char*> argv{"lll_lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*gen) {
      auto inst = gen_kind == "ksat" ? gen_ksat(gen_size, gen_k, gen_occ, gen_seed)
                                     : gen_hypergraph_coloring(gen_size, gen_k, gen_occ, gen_colors, gen_seed);
      if (gen_permute) inst = permute_event_ids(inst, gen_seed);
      detail::emit(write_instance(inst), gen_out, out);
    } else if (*run) {
      const auto inst = load_instance(run_instance);
      const auto table = sample_table(inst, run_seed);
      const auto cap = run_params.max_steps ? run_params.max_steps : default_max_steps(inst);
      if (run_meta_flag) {
        const auto m = run_meta(inst, table, derive_params(inst, run_params.overrides()), cap);
        auto j = local_report(m);
        j["seed"] = run_seed;
        detail::emit(detail::pretty(j), run_out, out);
        if (!run_hist.empty()) detail::emit(round_histogram_csv(m.report), run_hist, out);
        if (!m.report.terminated) code = kExitNonTermination;
      } else {
        const auto r = run_cps(inst, table, cap);
        detail::emit(detail::pretty(run_report(run_seed, r)), run_out, out);
        if (!r.log.terminated) code = kExitNonTermination;
      }
    } else if (*cls) {
      const auto inst = load_instance(cls_instance);
      const auto table = sample_table(inst, cls_seed);
      const auto r = run_cps(inst, table, cls_params.max_steps ? cls_params.max_steps : default_max_steps(inst));
      const auto a = analyze(inst, r.log, derive_params(inst, cls_params.overrides()));
      auto j = classification_report(a);
      j["seed"] = cls_seed;
      detail::emit(detail::pretty(j), cls_out, out);
      if (!a.certificates_valid || !a.ruling_set_valid || !a.decomposition_valid) code = kExitVerification;
      else if (!r.log.terminated) code = kExitNonTermination;
    } else if (*query) {
      const auto inst = load_instance(q_instance);
      LcaOptions opt;
      opt.volume_mode = q_volume;
      opt.max_steps = q_params.max_steps;
      LcaSession s(inst, q_seed, q_params.overrides(), opt);
      try {
        const auto a = s.query(q_node);
        detail::emit(detail::pretty(to_json(a)), q_out, out);
        if (!a.matches_global || !a.schedule_ok) code = kExitVerification;
      } catch (const VolumeViolation& e) {
        err << "volume violation: " << e.what() << "\n";
        code = kExitVerification;
      }
      if (code == kExitOk && !s.meta().global.log.terminated) code = kExitNonTermination;
    } else if (*verify) {
      ExperimentConfig cfg;
      if (!v_config.empty()) cfg = load_config(v_config);
      if (!v_instance.empty()) cfg.instance.file = v_instance;
      if (v_config.empty() || verify->count("--seeds")) cfg.seeds = detail::parse_seeds(v_seeds);
      if (!v_suites.empty()) cfg.suites = detail::split_list(v_suites);
      if (v_params.eps) cfg.params.eps = v_params.eps;
      if (v_params.ell) cfg.params.ell = v_params.ell;
      if (v_params.max_steps) cfg.max_steps = v_params.max_steps;
      if (cfg.instance.file.empty() && v_config.empty()) throw ValidationError("verify needs --instance or --config");
      cfg.validate();
      const auto rep = run_verify(cfg);
      const auto text = detail::pretty(to_json(rep));
      if (!cfg.output_dir.empty() && v_out.empty())
        detail::emit(text, (std::filesystem::path(cfg.output_dir) / "verify.json").string(), out);
      else
        detail::emit(text, v_out, out);
      for (const auto& s : rep.suites)
        err << (s.passed() ? "PASS " : "FAIL ") << s.name << (s.skipped ? " (skipped)" : "") << " checks=" << s.checks
            << " failures=" << s.failures << "\n";
      if (!rep.passed()) code = kExitVerification;
      else if (rep.non_terminated) code = kExitNonTermination;
    } else if (*sweep) {
      SweepSpec spec;
      spec.param = s_param;
      spec.values = detail::split_list(s_values);
      spec.base.file = s_instance;
      spec.base.generator = s_kind;
      spec.base.size = s_size;
      spec.base.k = s_k;
      spec.base.occurrence = s_occ;
      spec.base.colors = s_colors;
      spec.seeds = s_param == "seeds" ? std::vector<std::uint64_t>{} : detail::parse_seeds(s_seeds);
      spec.params = s_params.overrides();
      spec.queries = s_queries;
      spec.max_steps = s_params.max_steps;
      detail::emit(sweep_csv(run_sweep(spec)), s_out, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const RegimeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return code;
}

}  // namespace lll
