// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <vector>

#include "lll/instance.hpp"

namespace lll::fixture {

/// Ring of n 3-clauses: event i reads (a_i, b_i, a_{i+1}), so each event
/// touches its two ring neighbours. p = 1/8, d = 2.
inline Instance clause_ring(std::uint32_t n = 8) {
  std::vector<Variable> vars;
  for (VarId x = 0; x < 2 * n; ++x) vars.push_back(Variable::uniform(x, 2));
  std::vector<BadEvent> events;
  for (EventId i = 0; i < n; ++i) {
    const VarId a = 2 * i, b = 2 * i + 1, next = 2 * ((i + 1) % n);
    events.push_back(BadEvent::clause(i, {a, b, next}, {i % 2, 0, (i / 2) % 2}));
  }
  return Instance(vars, events);
}

/// Path 0 - 1 - ... - (n-1): event i is the clause on (x_i, x_{i+1}).
inline Instance clause_path(std::uint32_t n) {
  std::vector<Variable> vars;
  for (VarId x = 0; x <= n; ++x) vars.push_back(Variable::uniform(x, 2));
  std::vector<BadEvent> events;
  for (EventId i = 0; i < n; ++i) events.push_back(BadEvent::clause(i, {i, i + 1}, {0, 1}));
  return Instance(vars, events);
}

}  // namespace lll::fixture
