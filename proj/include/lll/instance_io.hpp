// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lll/instance.hpp"

namespace lll {

using Json = nlohmann::ordered_json;

inline Json to_json(const Instance& inst) {
  Json vars = Json::array();
  for (const auto& v : inst.variables())
    vars.push_back(Json{{"id", v.id}, {"domain_size", v.domain_size}, {"distribution", v.distribution}});
  Json events = Json::array();
  for (const auto& e : inst.events()) {
    Json payload;
    switch (e.kind) {
      case PredicateKind::Clause: payload = e.falsifying; break;
      case PredicateKind::ForbiddenSet: payload = e.forbidden; break;
      case PredicateKind::Monochromatic: payload = nullptr; break;
    }
    events.push_back(Json{{"id", e.id},
                          {"vars", e.vars},
                          {"predicate", Json{{"kind", to_string(e.kind)}, {"payload", std::move(payload)}}}});
  }
  return Json{{"variables", std::move(vars)}, {"events", std::move(events)}};
}

inline Instance instance_from_json(const Json& doc) {
  try {
    std::vector<Variable> vars;
    for (const auto& v : doc.at("variables")) {
      Variable var;
      var.id = v.at("id").get<VarId>();
      var.domain_size = v.at("domain_size").get<std::uint32_t>();
      var.distribution = v.at("distribution").get<std::vector<double>>();
      vars.push_back(std::move(var));
    }
    std::vector<BadEvent> events;
    for (const auto& e : doc.at("events")) {
      const auto& pred = e.at("predicate");
      const auto kind = pred.at("kind").get<std::string>();
      const auto id = e.at("id").get<EventId>();
      auto scope = e.at("vars").get<std::vector<VarId>>();
      const auto& payload = pred.at("payload");
      if (kind == "clause") {
        events.push_back(BadEvent::clause(id, std::move(scope), payload.get<std::vector<Value>>()));
      } else if (kind == "forbidden-set") {
        events.push_back(
            BadEvent::forbidden_set(id, std::move(scope), payload.get<std::vector<std::vector<Value>>>()));
      } else if (kind == "monochromatic") {
        events.push_back(BadEvent::monochromatic(id, std::move(scope)));
      } else {
        throw ValidationError("unknown predicate kind '" + kind + "'");
      }
    }
    return Instance(std::move(vars), std::move(events));
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed instance document: ") + ex.what());
  }
}

inline std::string write_instance(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

inline Instance read_instance(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ValidationError(std::string("instance is not valid JSON: ") + ex.what());
  }
  return instance_from_json(doc);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return read_instance(buf.str());
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write instance file " + path);
  out << write_instance(inst);
}

}  // namespace lll
