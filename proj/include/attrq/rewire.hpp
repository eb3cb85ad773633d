#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "attrq/state.hpp"

namespace attrq {

struct Transition {
  StateCode target;
  double probability = 0.0;

  bool operator==(const Transition&) const = default;
};

/// Outgoing transitions of one state; empty means no successors.
using Row = std::vector<Transition>;

/// Supplies the current (possibly rewired) row of a state.
using RowSource = std::function<void(StateCode, Row&)>;

/// A dismantled cycle C, its exits B and the replacement rows
/// r1 = (Id - q)^-1 r, one per member of C.
struct RewireRecord {
  std::vector<StateCode> cycle;
  std::vector<StateCode> exits;
  /// rows[i] is the new row of cycle[i]; targets are exits only.
  std::vector<Row> rows;
  /// Number of (c, b) transitions leaving C before rewiring.
  std::size_t exit_transitions = 0;

  double exit_ratio() const {
    return cycle.empty() ? 0.0 : static_cast<double>(exit_transitions) / static_cast<double>(cycle.size());
  }
};

/// Exit states B of a state set under the given rows (sorted).
std::vector<StateCode> cycle_exits(const RowSource& rows, std::span<const StateCode> cycle);

/// Replaces all transitions inside `cycle` by direct transitions to its
/// exits, weighted by the probability of leaving through each exit. Uses a
/// dense LU solve up to `dense_limit` states and the series sum q^k r beyond
/// (stopping once ||q^k 1||_inf < 1e-12).
///
/// Returns nullopt when the set has no exits. Throws NumericalError when some
/// member cannot reach an exit (rows would not sum to 1).
std::optional<RewireRecord> rewire(const RowSource& rows, std::span<const StateCode> cycle,
                                   std::size_t dense_limit = 2048);

/// Grows a detected cycle: explores forward from it (to depth `tau`, or
/// exhaustively up to `max_states` when `inflationary`) and returns the SCC
/// of the explored subgraph that contains the cycle, merged with the cycle
/// itself. Result is sorted.
std::vector<StateCode> extend_cycle(const RowSource& rows, std::span<const StateCode> cycle, std::size_t tau,
                                    bool inflationary, std::size_t max_states = std::size_t{1} << 20);

}  // namespace attrq
