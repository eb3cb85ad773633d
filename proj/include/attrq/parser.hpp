#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attrq/model.hpp"
#include "attrq/state.hpp"

namespace attrq {

/// Initial law: fixed coordinates, uniformly sampled coordinates, 0 elsewhere.
struct InitialSpec {
  std::map<std::size_t, Level> fixed;
  /// Sorted component indices drawn uniformly per run.
  std::vector<std::size_t> sampled;

  bool is_point_mass() const noexcept { return sampled.empty(); }
  bool operator==(const InitialSpec&) const = default;
};

/// One level per component, nullopt meaning wildcard.
using OraclePattern = std::vector<std::optional<Level>>;

/// A known attractor described by a union of level patterns.
struct OracleSpec {
  std::string id;
  std::vector<OraclePattern> patterns;

  bool matches(std::span<const Level> state) const;
  bool operator==(const OracleSpec&) const = default;
};

struct ModelDocument {
  std::string name;
  LogicalModel model;
  InitialSpec initial;
  std::vector<OracleSpec> oracles;

  bool operator==(const ModelDocument& other) const;
};

/// Parses the line-oriented model format:
///
///     NODE <name> <max>            INPUT <name> <max>
///     TARGET <name> <level> : <expr>
///     INIT <name>=<level|SAMPLE> ...      INIT * SAMPLE
///     ORACLE <id> : <name>=<level|*> ...
///
/// Throws ParseError (with the offending line) on any syntax or semantic
/// problem.
ModelDocument parse_model(std::string_view text, std::string name = "model");

/// Reads and parses a file; the document name is the file stem.
ModelDocument load_model(const std::filesystem::path& path);

/// Canonical text form; parse_model(print_model(d)) == d.
std::string print_model(const ModelDocument& doc);

/// Renders a condition in the file grammar with minimal parentheses.
std::string format_expr(const LogicalModel& model, const BoolExpr& expr);

/// The point-mass initial state (sampled coordinates left at 0).
State initial_state(const ModelDocument& doc);

/// mu0 as an explicit distribution; throws CapacityError when the sampled
/// product exceeds `max_support` states.
SparseDistribution initial_distribution(const ModelDocument& doc, std::size_t max_support = std::size_t{1} << 22);

/// Index of the first oracle matching `state`, if any.
std::optional<std::size_t> match_oracle(std::span<const OracleSpec> oracles, std::span<const Level> state);

/// Number of distinct states an oracle denotes, or nullopt when enumeration
/// would exceed `limit` pattern expansions.
std::optional<std::size_t> oracle_state_count(const LogicalModel& model, const OracleSpec& oracle,
                                              std::size_t limit = std::size_t{1} << 20);

}  // namespace attrq
