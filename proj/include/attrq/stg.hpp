#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attrq/model.hpp"
#include "attrq/result.hpp"
#include "attrq/state.hpp"

namespace attrq {

inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 22;

/// Explicit weighted state transition graph in CSR form. States are stored
/// in ascending code order; edges reference state indices.
class ExplicitSTG {
 public:
  struct WeightedEdge {
    StateCode target;
    double probability;
  };

  ExplicitSTG() = default;

  /// Builds from explicit rows; every edge target must itself appear as a key.
  static ExplicitSTG from_rows(const std::unordered_map<StateCode, std::vector<WeightedEdge>, StateCodeHash>& rows);

  std::size_t size() const noexcept { return states_.size(); }
  std::size_t edge_count() const noexcept { return targets_.size(); }
  StateCode state(std::size_t index) const { return states_[index]; }
  std::span<const StateCode> states() const noexcept { return states_; }
  std::optional<std::size_t> index_of(StateCode code) const;

  std::span<const std::uint32_t> successors(std::size_t index) const {
    return {targets_.data() + offsets_[index], offsets_[index + 1] - offsets_[index]};
  }
  std::span<const double> weights(std::size_t index) const {
    return {probs_.data() + offsets_[index], offsets_[index + 1] - offsets_[index]};
  }
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const std::uint32_t> targets() const noexcept { return targets_; }

 private:
  friend ExplicitSTG build_stg(const LogicalModel&, std::span<const StateCode>, std::size_t);

  std::vector<StateCode> states_;
  std::unordered_map<StateCode, std::uint32_t, StateCodeHash> index_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> targets_;
  std::vector<double> probs_;
};

/// Forward-reachable STG from `roots` with uniform asynchronous weights.
/// Throws CapacityError when more than `cap` states are reachable.
ExplicitSTG build_stg(const LogicalModel& model, std::span<const StateCode> roots, std::size_t cap = kDefaultStateCap);

/// Reachable STG from `root`, or the full state space when root is empty.
ExplicitSTG build_stg(const LogicalModel& model, const std::optional<State>& root, std::size_t cap = kDefaultStateCap);

struct SccDecomposition {
  /// SCC index of every STG state (by state index).
  std::vector<std::uint32_t> component_id;
  /// Members (state indices, ascending) of each SCC. SCCs are numbered in
  /// reverse topological order of the quotient DAG (sinks first).
  std::vector<std::vector<std::uint32_t>> members;
  std::vector<bool> terminal;

  std::size_t count() const noexcept { return members.size(); }
};

/// Iterative Tarjan over a CSR graph of `n` nodes.
SccDecomposition strongly_connected_components(std::size_t n, std::span<const std::size_t> offsets,
                                               std::span<const std::uint32_t> targets);

SccDecomposition tarjan_scc(const ExplicitSTG& stg);

/// One attractor per terminal SCC, in SCC order.
std::vector<Attractor> attractors(const ExplicitSTG& stg, const SccDecomposition& dec);

/// Quotient DAG in Graphviz DOT; terminal SCCs are drawn as boxes.
void write_quotient_dot(std::ostream& out, const ExplicitSTG& stg, const SccDecomposition& dec,
                        const LogicalModel* model = nullptr);

}  // namespace attrq
