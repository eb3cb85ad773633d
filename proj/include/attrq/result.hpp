#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "attrq/model.hpp"
#include "attrq/state.hpp"

namespace attrq {

enum class AttractorKind { kPoint, kComplex };

/// A terminal SCC, or a state set named by a user oracle.
struct Attractor {
  AttractorKind kind = AttractorKind::kPoint;
  /// Sorted member codes; empty when the attractor is only known by its oracle.
  std::vector<StateCode> members;
  /// Oracle id when the attractor was recognised by a user-supplied oracle.
  std::string oracle;
  /// Number of states (members.size(), or the oracle's state count; 0 if unknown).
  std::uint64_t size = 0;

  static Attractor point(StateCode state) { return Attractor{AttractorKind::kPoint, {state}, {}, 1}; }
  static Attractor from_members(std::vector<StateCode> members);
  static Attractor from_oracle(std::string id, std::uint64_t size);

  bool operator==(const Attractor&) const = default;
};

/// Valuation of sampled input components and the probability mass it sent
/// to one attractor.
struct InputBreakdown {
  std::vector<std::pair<std::string, Level>> valuation;
  double probability = 0.0;
  std::uint64_t hits = 0;
};

struct AttractorEstimate {
  Attractor attractor;
  double probability = 0.0;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  std::optional<double> std_error;
  std::optional<double> avg_depth;
  std::vector<InputBreakdown> inputs;
};

using ParamValue = std::variant<std::int64_t, double, std::string>;

struct AbsorptionResult {
  std::string model;
  std::string method;
  std::vector<std::pair<std::string, ParamValue>> parameters;
  std::vector<AttractorEstimate> attractors;
  std::optional<double> residual_probability;
  std::optional<std::int64_t> iterations;
  std::optional<std::int64_t> runs;
  std::optional<std::int64_t> aborted_runs;
  bool iteration_cap_reached = false;
  double wall_time_s = 0.0;

  /// Sorts attractors by descending probability, ties by smallest member
  /// code, then oracle id.
  void sort_attractors();
  double total_probability() const;
};

/// Table-style id of the i-th attractor of a sorted result ("PA1", "CA2").
std::string attractor_id(const AttractorEstimate& estimate, std::size_t index);

enum class ResultFormat { kJson, kCsv };

/// Deterministic rendering; `model` (optional) is used to render states.
std::string serialize_result(const AbsorptionResult& result, ResultFormat format, const LogicalModel* model = nullptr);

}  // namespace attrq
