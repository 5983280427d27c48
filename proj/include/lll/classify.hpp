// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "lll/graph.hpp"
#include "lll/instance.hpp"
#include "lll/resampler.hpp"
#include "lll/witness.hpp"

namespace lll {

inline constexpr double kDefaultEpsCap = 0.099;
inline constexpr std::size_t kExactDiameterLimit = 10000;

struct ParamOverrides {
  std::optional<double> eps{};
  std::optional<double> ell{};  ///< replaces log_{1/(1-eps)} log_{1/p} n
};

/// eps, lambda = 2/eps, ell = log_{1/(1-eps)} log_{1/p} n and the integer
/// thresholds derived from them.
struct NarrowParams {
  double eps = kDefaultEpsCap;
  double lambda = 2.0 / kDefaultEpsCap;
  double ell = 1.0;
  double log_n = 0.0;  ///< log_{1/p} n
  double delta = std::numeric_limits<double>::quiet_NaN();  ///< p = d^{-(10+delta)}
  std::uint32_t size_threshold = 0;  ///< ceil(lambda ell)
  std::uint32_t R_max = 0;           ///< ceil(2 (lambda+2) ell)
  std::uint32_t phase1_steps = 0;    ///< ceil((lambda+2) ell)
  bool feasible = false;         ///< d^10 <= (1/p)^{1-2 eps}
  bool trivially_local = false;  ///< d < 2 or log_{1/p} n < 2
  bool ell_clamped = false;      ///< raw ell was below 1 and was raised to 1
  bool eps_overridden = false;
  bool ell_overridden = false;

  /// Ruling-set separation ceil(4 (lambda+2) ell) + 5; domination is one less.
  [[nodiscard]] std::uint32_t ruling_alpha() const {
    return static_cast<std::uint32_t>(std::ceil(4.0 * (lambda + 2.0) * ell - 1e-9)) + 5;
  }
  [[nodiscard]] std::uint32_t ruling_beta() const { return ruling_alpha() - 1; }
};

namespace detail {
inline std::uint32_t ceil_u32(double x) { return static_cast<std::uint32_t>(std::ceil(x - 1e-9)); }
}  // namespace detail

/// Parameter derivation from (n, d, p).
inline NarrowParams derive_params(std::uint32_t n, std::uint32_t d, double p, const ParamOverrides& ov = {}) {
  if (!(p < 1.0)) throw ValidationError("parameter derivation needs p < 1");
  if (n < 2) throw ValidationError("parameter derivation needs n >= 2");
  NarrowParams P;
  P.log_n = p > 0.0 ? std::log(static_cast<double>(n)) / std::log(1.0 / p) : 0.0;
  P.trivially_local = d < 2 || P.log_n < 2.0;
  if (d >= 2 && p > 0.0) P.delta = std::log(1.0 / p) / std::log(static_cast<double>(d)) - 10.0;

  if (ov.eps) {
    if (!(*ov.eps > 0.0 && *ov.eps < 0.1)) throw ValidationError("eps must lie in (0, 0.1)");
    P.eps = *ov.eps;
    P.eps_overridden = true;
  } else if (!std::isnan(P.delta) && P.delta > 0.0) {
    P.eps = std::min(kDefaultEpsCap, 0.9 * P.delta / (2.0 * (10.0 + P.delta)));
  }
  P.lambda = 2.0 / P.eps;
  if (d < 2 || p == 0.0)
    P.feasible = true;
  else
    P.feasible = 10.0 * std::log(static_cast<double>(d)) <= (1.0 - 2.0 * P.eps) * std::log(1.0 / p) * (1.0 + 1e-12);

  if (ov.ell) {
    if (!(*ov.ell > 0.0)) throw ValidationError("ell override must be positive");
    P.ell = *ov.ell;
    P.ell_overridden = true;
  } else {
    const double raw = P.log_n > 1.0 ? std::log(P.log_n) / std::log(1.0 / (1.0 - P.eps)) : 0.0;
    P.ell_clamped = raw < 1.0;
    P.ell = std::max(1.0, raw);
  }
  P.size_threshold = detail::ceil_u32(P.lambda * P.ell);
  P.R_max = detail::ceil_u32(2.0 * (P.lambda + 2.0) * P.ell);
  P.phase1_steps = detail::ceil_u32((P.lambda + 2.0) * P.ell);
  return P;
}

inline NarrowParams derive_params(const Instance& inst, const ParamOverrides& ov = {}) {
  return derive_params(inst.n(), inst.d(), inst.p(), ov);
}

inline nlohmann::ordered_json to_json(const NarrowParams& P) {
  return {{"eps", P.eps},
          {"lambda", P.lambda},
          {"ell", P.ell},
          {"log_inv_p_n", P.log_n},
          {"delta", std::isnan(P.delta) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(P.delta)},
          {"size_threshold", P.size_threshold},
          {"R_max", P.R_max},
          {"phase1_steps", P.phase1_steps},
          {"feasible", P.feasible},
          {"trivially_local", P.trivially_local},
          {"ell_clamped", P.ell_clamped},
          {"eps_overridden", P.eps_overridden},
          {"ell_overridden", P.ell_overridden}};
}

/// The (t, R) at which v roots a large narrow possible tree.
struct RiskCertificate {
  EventId event = 0;
  std::uint32_t t = 0;
  std::uint32_t R = 0;
  std::size_t size = 0;
  std::size_t boundary = 0;
};

struct Classification {
  NarrowParams params;
  std::vector<char> risky;     // per event
  std::vector<char> insecure;  // per event
  std::vector<EventId> risky_nodes;
  std::vector<EventId> insecure_nodes;
  std::vector<RiskCertificate> certificates;  // one per risky event, by event id

  [[nodiscard]] bool is_risky(EventId v) const { return risky[v] != 0; }
  [[nodiscard]] bool is_insecure(EventId v) const { return insecure[v] != 0; }
};

/// First (R, summary) in 0..R_max making the profile a certificate, if any.
inline std::optional<RadiusSummary> narrow_certificate(const PossibleProfile& prof, const NarrowParams& P) {
  if (prof.entries.size() < P.size_threshold) return std::nullopt;
  for (const auto& s : prof.summaries(P.R_max))
    if (s.size >= P.size_threshold && is_narrow(s.size, s.boundary, P.eps)) return s;
  return std::nullopt;
}

/// Insecure = risky plus neighbours of risky.
inline void close_insecure(const DependencyGraph& g, Classification& c) {
  c.insecure.assign(g.size(), 0);
  for (EventId v : c.risky_nodes) {
    c.insecure[v] = 1;
    for (EventId u : g.neighbors(v)) c.insecure[u] = 1;
  }
  c.insecure_nodes.clear();
  for (EventId v = 0; v < g.size(); ++v)
    if (c.insecure[v]) c.insecure_nodes.push_back(v);
}

/// Marks every root (v, t) of the log that has an R-possible eps-narrow tree
/// of size >= size_threshold for some R <= R_max. Roots up to `max_t` only
/// (0 means the whole log).
inline Classification classify_risky(const Instance& inst, const ExecutionLog& log, const NarrowParams& P,
                                     std::size_t max_t = 0) {
  Classification c;
  c.params = P;
  c.risky.assign(inst.n(), 0);
  WitnessBuilder builder(inst.graph(), log);
  const std::size_t T = max_t ? std::min(max_t, log.total_steps()) : log.total_steps();
  std::vector<RiskCertificate> found;
  for (std::size_t t = 1; t <= T; ++t) {
    for (EventId v : log.at(t)) {
      if (c.risky[v]) continue;
      const auto prof = builder.profile(v, t, P.R_max);
      if (auto s = narrow_certificate(prof, P)) {
        c.risky[v] = 1;
        found.push_back({v, static_cast<std::uint32_t>(t), s->R, s->size, s->boundary});
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.event < b.event; });
  c.certificates = std::move(found);
  for (const auto& cert : c.certificates) c.risky_nodes.push_back(cert.event);
  close_insecure(inst.graph(), c);
  return c;
}

/// Re-builds a certified tree and checks it is what the certificate claims.
inline bool verify_certificate(const DependencyGraph& g, const ExecutionLog& log, const NarrowParams& P,
                               const RiskCertificate& cert) {
  if (cert.R > P.R_max || cert.size < P.size_threshold) return false;
  const auto tree = build_possible(g, log, cert.event, cert.t, cert.R);
  return tree.size() == cert.size && tree.boundary_count() == cert.boundary && is_narrow(tree, P.eps);
}

struct Component {
  std::vector<EventId> nodes;  // sorted
  std::uint32_t diameter = 0;  // max G-distance over node pairs
  bool diameter_exact = true;
};

/// Induced subgraph G' of the insecure events, split into components.
struct InsecureSubgraph {
  std::vector<EventId> nodes;
  std::vector<char> member;
  std::vector<Component> components;
  std::vector<std::uint32_t> component_of;  // kUnreached outside G'
  std::size_t edge_count = 0;
};

namespace detail {

// max over pairs of dist_G; BFS from every node, or from a sample above the cap.
inline std::pair<std::uint32_t, bool> g_diameter(const DependencyGraph& g, const std::vector<EventId>& nodes) {
  if (nodes.size() <= 1) return {0, true};
  Bfs bfs(g);
  const bool exact = nodes.size() <= kExactDiameterLimit;
  const std::size_t sources = exact ? nodes.size() : 64;
  std::uint32_t best = 0;
  for (std::size_t k = 0; k < sources; ++k) {
    const EventId s = exact ? nodes[k] : nodes[(k * nodes.size()) / sources];
    bfs.run(s);
    for (EventId u : nodes) best = std::max(best, bfs.distance(u));
  }
  return {best, exact};
}

}  // namespace detail

inline InsecureSubgraph insecure_subgraph(const Instance& inst, const Classification& c) {
  const auto& g = inst.graph();
  InsecureSubgraph sub;
  sub.nodes = c.insecure_nodes;
  sub.member = c.insecure;
  sub.component_of.assign(g.size(), kUnreached);
  for (EventId v : sub.nodes) {
    for (EventId u : g.neighbors(v))
      if (u > v && sub.member[u]) ++sub.edge_count;
    if (sub.component_of[v] != kUnreached) continue;
    Component comp;
    const auto id = static_cast<std::uint32_t>(sub.components.size());
    std::vector<EventId> stack{v};
    sub.component_of[v] = id;
    while (!stack.empty()) {
      const EventId x = stack.back();
      stack.pop_back();
      comp.nodes.push_back(x);
      for (EventId u : g.neighbors(x)) {
        if (sub.member[u] && sub.component_of[u] == kUnreached) {
          sub.component_of[u] = id;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.nodes.begin(), comp.nodes.end());
    std::tie(comp.diameter, comp.diameter_exact) = detail::g_diameter(g, comp.nodes);
    sub.components.push_back(std::move(comp));
  }
  return sub;
}

/// Greedy (alpha, alpha-1)-ruling set of the nodes under G-distances,
/// scanning nodes by increasing id.
inline std::vector<EventId> ruling_set(const DependencyGraph& g, const std::vector<EventId>& nodes,
                                       std::uint32_t alpha, std::uint32_t beta) {
  if (alpha != beta + 1) throw ValidationError("ruling set needs alpha = beta + 1");
  std::vector<EventId> order(nodes);
  std::sort(order.begin(), order.end());
  std::vector<char> blocked(g.size(), 0);
  std::vector<EventId> out;
  Bfs bfs(g);
  for (EventId v : order) {
    if (blocked[v]) continue;
    out.push_back(v);
    bfs.run(v, alpha - 1);
    for (EventId u : bfs.order()) blocked[u] = 1;
  }
  return out;
}

/// BFS re-check of separation and domination.
inline bool verify_ruling_set(const DependencyGraph& g, const std::vector<EventId>& nodes,
                              const std::vector<EventId>& rulers, std::uint32_t alpha, std::uint32_t beta) {
  if (nodes.empty()) return rulers.empty();
  std::vector<char> is_ruler(g.size(), 0), covered(g.size(), 0);
  for (EventId r : rulers) is_ruler[r] = 1;
  Bfs bfs(g);
  for (EventId r : rulers) {
    bfs.run(r, std::max(alpha - 1, beta));
    for (EventId u : bfs.order()) {
      if (u != r && is_ruler[u] && bfs.distance(u) < alpha) return false;
      if (bfs.distance(u) <= beta) covered[u] = 1;
    }
  }
  for (EventId v : nodes)
    if (!covered[v]) return false;
  return true;
}

struct Decomposition {
  std::vector<EventId> rulers;
  std::vector<std::uint32_t> cluster_of;  // per event; kUnreached outside G'
  std::vector<std::uint32_t> color_of_cluster;
  std::vector<std::vector<EventId>> clusters;  // indexed like rulers
  std::uint32_t colors = 0;
  std::uint32_t max_cluster_diameter = 0;
  bool diameter_exact = true;
};

/// Contracts every insecure node to its closest ruler (G-distance, ties by
/// BFS order with rulers seeded by id) and greedily colours the clusters so
/// that adjacent clusters differ.
inline Decomposition network_decomposition(const DependencyGraph& g, const InsecureSubgraph& sub,
                                           std::vector<EventId> rulers) {
  Decomposition dec;
  std::sort(rulers.begin(), rulers.end());
  dec.rulers = rulers;
  dec.cluster_of.assign(g.size(), kUnreached);
  dec.clusters.resize(rulers.size());
  if (sub.nodes.empty()) return dec;

  std::vector<std::uint32_t> label(g.size(), kUnreached);
  std::vector<EventId> queue;
  for (std::uint32_t k = 0; k < rulers.size(); ++k) {
    label[rulers[k]] = k;
    queue.push_back(rulers[k]);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const EventId v = queue[head];
    for (EventId u : g.neighbors(v)) {
      if (label[u] == kUnreached) {
        label[u] = label[v];
        queue.push_back(u);
      }
    }
  }
  for (EventId v : sub.nodes) {
    if (label[v] == kUnreached) throw ValidationError("insecure node unreachable from every ruler");
    dec.cluster_of[v] = label[v];
    dec.clusters[label[v]].push_back(v);
  }

  const auto k = rulers.size();
  std::vector<std::vector<std::uint32_t>> adj(k);
  for (EventId v : sub.nodes)
    for (EventId u : g.neighbors(v))
      if (sub.member[u] && dec.cluster_of[u] != dec.cluster_of[v]) adj[dec.cluster_of[v]].push_back(dec.cluster_of[u]);
  dec.color_of_cluster.assign(k, kUnreached);
  for (std::uint32_t c = 0; c < k; ++c) {
    std::vector<char> used(k + 1, 0);
    for (auto o : adj[c])
      if (dec.color_of_cluster[o] != kUnreached) used[dec.color_of_cluster[o]] = 1;
    std::uint32_t col = 0;
    while (used[col]) ++col;
    dec.color_of_cluster[c] = col;
    dec.colors = std::max(dec.colors, col + 1);
  }
  for (const auto& cl : dec.clusters) {
    const auto [diam, exact] = detail::g_diameter(g, cl);
    dec.max_cluster_diameter = std::max(dec.max_cluster_diameter, diam);
    dec.diameter_exact = dec.diameter_exact && exact;
  }
  return dec;
}

/// Same-coloured clusters are never joined by an edge of G'.
inline bool verify_decomposition(const DependencyGraph& g, const InsecureSubgraph& sub, const Decomposition& dec) {
  for (EventId v : sub.nodes) {
    const auto cv = dec.cluster_of[v];
    if (cv == kUnreached) return false;
    for (EventId u : g.neighbors(v)) {
      if (!sub.member[u]) continue;
      const auto cu = dec.cluster_of[u];
      if (cu != cv && dec.color_of_cluster[cu] == dec.color_of_cluster[cv]) return false;
    }
  }
  return true;
}

/// Everything the classification report needs, computed once.
struct ClassificationAnalysis {
  Classification classification;
  InsecureSubgraph subgraph;
  Decomposition decomposition;
  bool ruling_set_valid = true;
  bool decomposition_valid = true;
  bool certificates_valid = true;
};

inline ClassificationAnalysis analyze(const Instance& inst, const ExecutionLog& log, const NarrowParams& P) {
  ClassificationAnalysis a;
  a.classification = classify_risky(inst, log, P);
  for (const auto& cert : a.classification.certificates)
    a.certificates_valid = a.certificates_valid && verify_certificate(inst.graph(), log, P, cert);
  a.subgraph = insecure_subgraph(inst, a.classification);
  const auto alpha = P.ruling_alpha(), beta = P.ruling_beta();
  auto rulers = ruling_set(inst.graph(), a.subgraph.nodes, alpha, beta);
  a.ruling_set_valid = verify_ruling_set(inst.graph(), a.subgraph.nodes, rulers, alpha, beta);
  a.decomposition = network_decomposition(inst.graph(), a.subgraph, std::move(rulers));
  a.decomposition_valid = verify_decomposition(inst.graph(), a.subgraph, a.decomposition);
  return a;
}

inline nlohmann::ordered_json classification_report(const ClassificationAnalysis& a) {
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (const auto& c : a.subgraph.components) {
    nlohmann::ordered_json j{{"size", c.nodes.size()}, {"diameter", c.diameter}};
    if (!c.diameter_exact) j["diameter_lower_bound"] = true;
    comps.push_back(std::move(j));
  }
  return {{"params", to_json(a.classification.params)},
          {"risky_count", a.classification.risky_nodes.size()},
          {"insecure_count", a.classification.insecure_nodes.size()},
          {"components", std::move(comps)},
          {"decomposition",
           {{"colors", a.decomposition.colors},
            {"max_cluster_diameter", a.decomposition.max_cluster_diameter},
            {"clusters", a.decomposition.clusters.size()},
            {"valid", a.decomposition_valid && a.ruling_set_valid}}}};
}

}  // namespace lll
