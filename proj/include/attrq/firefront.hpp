#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attrq/model.hpp"
#include "attrq/parser.hpp"
#include "attrq/result.hpp"
#include "attrq/state.hpp"

namespace attrq {

struct FirefrontConfig {
  /// States whose accumulated mass stays below alpha are parked in N.
  double alpha = 1e-5;
  /// The run stops once P(F) <= beta.
  double beta = 1e-3;
  /// Defaults to |S|^2 capped at 2^31.
  std::optional<std::int64_t> max_iterations;
  bool trace = false;

  void validate() const;
};

/// Firefront F, neglected set N and attractor set A. A holds point
/// attractors by state and oracle hits by oracle index.
struct FirefrontState {
  SparseDistribution firefront;
  SparseDistribution neglected;
  SparseDistribution point_attractors;
  std::vector<double> oracle_mass;
  std::int64_t iteration = 0;

  static FirefrontState start(StateCode initial, std::size_t oracle_count);

  double firefront_mass() const;
  double neglected_mass() const;
  double attractor_mass() const;
  std::size_t attractor_count() const;
};

struct FirefrontTraceRow {
  std::int64_t iteration = 0;
  std::size_t firefront_size = 0;
  std::size_t neglected_size = 0;
  std::size_t attractor_size = 0;
  double firefront_mass = 0.0;
  double neglected_mass = 0.0;
  double attractor_mass = 0.0;
};

/// One breadth-wise propagation step: every state of F is either absorbed
/// into A (no successors or oracle match) or spreads its mass uniformly over
/// its successors. Stable or oracle successors are absorbed on arrival; the
/// others land in F' or N according to alpha.
FirefrontState firefront_step(const LogicalModel& model, std::span<const OracleSpec> oracles,
                              FirefrontState state, const FirefrontConfig& config);

struct FirefrontOutcome {
  AbsorptionResult result;
  std::vector<FirefrontTraceRow> trace;
  FirefrontState final_state;
};

/// Propagates from the document's point initial state until P(F) <= beta or
/// the iteration cap. Point-attractor probabilities are lower bounds; the
/// upper bound adds the residual P(F) + P(N). Throws std::invalid_argument if
/// the initial law samples any coordinate.
FirefrontOutcome firefront_run(const ModelDocument& doc, const FirefrontConfig& config);

/// CSV with columns iteration,F_size,N_size,A_size,P_F,P_N,P_A.
std::string emit_trace(std::span<const FirefrontTraceRow> rows);

}  // namespace attrq
