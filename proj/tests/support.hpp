#pragma once

// Independent reference computations used as test oracles. Nothing here
// calls into the solvers under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "attrq/model.hpp"
#include "attrq/parser.hpp"
#include "attrq/rewire.hpp"
#include "attrq/stg.hpp"

namespace attrq::testing {

/// Explicit weighted graph over small integer ids.
using Rows = std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, double>>>;

inline StateCode code(std::uint64_t v) { return StateCode(static_cast<StateCode::Rep>(v)); }

inline ExplicitSTG stg_from(const Rows& rows) {
  std::unordered_map<StateCode, std::vector<ExplicitSTG::WeightedEdge>, StateCodeHash> out;
  for (const auto& [s, edges] : rows) {
    auto& row = out[code(s)];
    for (const auto& [t, p] : edges) row.push_back({code(t), p});
  }
  return ExplicitSTG::from_rows(out);
}

inline RowSource row_source(const Rows& rows) {
  return [&rows](StateCode s, Row& out) {
    out.clear();
    auto it = rows.find(static_cast<std::uint64_t>(s.value()));
    if (it == rows.end()) return;
    for (const auto& [t, p] : it->second) out.push_back(Transition{code(t), p});
  };
}

/// Full STG of a model as rows, enumerated state by state with uniform
/// weights over the successors the model reports.
inline Rows model_rows(const LogicalModel& model) {
  Rows rows;
  const auto n = static_cast<std::uint64_t>(model.state_count());
  for (std::uint64_t s = 0; s < n; ++s) {
    const State v = model.decode(code(s));
    const auto succ = model.successors(v);
    auto& row = rows[s];
    for (const auto& w : succ) row.emplace_back(static_cast<std::uint64_t>(model.encode(w).value()),
                                                1.0 / static_cast<double>(succ.size()));
  }
  return rows;
}

/// Forward reachability sets by repeated BFS.
inline std::map<std::uint64_t, std::set<std::uint64_t>> reachability(const Rows& rows) {
  std::map<std::uint64_t, std::set<std::uint64_t>> reach;
  for (const auto& [s, _] : rows) {
    std::set<std::uint64_t> seen{s};
    std::vector<std::uint64_t> stack{s};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      auto it = rows.find(v);
      if (it == rows.end()) continue;
      for (const auto& [t, p] : it->second)
        if (p > 0.0 && seen.insert(t).second) stack.push_back(t);
    }
    reach[s] = std::move(seen);
  }
  return reach;
}

/// Terminal SCCs by mutual reachability: s is in a terminal SCC iff every
/// state it reaches reaches s back.
inline std::vector<std::set<std::uint64_t>> brute_force_attractors(const Rows& rows) {
  const auto reach = reachability(rows);
  std::set<std::set<std::uint64_t>> out;
  for (const auto& [s, r] : reach) {
    const bool terminal =
        std::all_of(r.begin(), r.end(), [&](std::uint64_t t) { return reach.at(t).count(s) != 0; });
    if (terminal) out.insert(r);
  }
  return {out.begin(), out.end()};
}

/// Absorption probabilities by Gauss-Seidel value iteration:
/// x_a(s) = 1 on attractor a, otherwise sum_t p(s,t) x_a(t).
inline std::vector<double> value_iteration(const Rows& rows, const std::vector<std::set<std::uint64_t>>& attractors,
                                           std::uint64_t start, double tolerance = 1e-15,
                                           std::size_t max_sweeps = 2'000'000) {
  std::vector<double> result;
  for (const auto& a : attractors) {
    std::map<std::uint64_t, double> x;
    for (const auto& [s, _] : rows) x[s] = a.count(s) ? 1.0 : 0.0;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
      double change = 0.0;
      for (const auto& [s, edges] : rows) {
        if (a.count(s) || edges.empty()) continue;
        double v = 0.0;
        for (const auto& [t, p] : edges) v += p * x[t];
        change = std::max(change, std::abs(v - x[s]));
        x[s] = v;
      }
      if (change < tolerance) break;
    }
    result.push_back(x[start]);
  }
  return result;
}

inline ModelDocument toggle_doc() {
  return parse_model("NODE a 1\nNODE b 1\nTARGET a 1 : b=0\nTARGET b 1 : a=0\n", "toggle");
}

inline ModelDocument repressilator_doc() {
  return parse_model("NODE a 1\nNODE b 1\nNODE c 1\nTARGET a 1 : c=0\nTARGET b 1 : a=0\nTARGET c 1 : b=0\n",
                     "repressilator");
}

/// Rows of the cycle c1..c4 (ids 1..4) with exits v5..v8 (ids 5..8): every
/// cycle state moves to the next cycle state or to its own exit with 1/2.
inline Rows four_cycle_rows() {
  return Rows{{1, {{2, 0.5}, {5, 0.5}}},
              {2, {{3, 0.5}, {7, 0.5}}},
              {3, {{4, 0.5}, {8, 0.5}}},
              {4, {{1, 0.5}, {6, 0.5}}},
              {5, {}},
              {6, {}},
              {7, {}},
              {8, {}}};
}

}  // namespace attrq::testing
