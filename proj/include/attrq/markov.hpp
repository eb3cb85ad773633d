#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "attrq/parser.hpp"
#include "attrq/result.hpp"
#include "attrq/stg.hpp"

namespace attrq {

/// The chain stopped on absorption: transient states T (ascending code),
/// absorbing classes A, and the blocks Q (T x T) and P (T x A).
struct AbsorbingChain {
  using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  std::vector<StateCode> transient;
  std::vector<Attractor> classes;
  SparseRows q;
  SparseRows p;
  std::unordered_map<StateCode, std::uint32_t, StateCodeHash> transient_index;
  /// Member state -> index into `classes`.
  std::unordered_map<StateCode, std::uint32_t, StateCodeHash> class_index;
};

/// Collapses each terminal SCC to one absorbing column:
/// P(u, a) = sum over v in a of Pi(u, v).
AbsorbingChain build_chain(const ExplicitSTG& stg, const SccDecomposition& dec);

/// Exact absorption probabilities mu0 (Id - Q)^-1 P by sparse LU, together
/// with the mean number of transitions before absorption conditioned on each
/// attractor. Attractors with zero probability are omitted.
///
/// Throws std::invalid_argument when mu0 has mass outside the chain and
/// NumericalError when Id - Q is numerically singular.
AbsorptionResult absorption_probabilities(const AbsorbingChain& chain, const SparseDistribution& mu0);

/// Truncated series (sum_{j < k_max} Q^j) P applied to mu0. Mass still
/// transient after k_max steps is reported as the residual.
AbsorptionResult power_absorption_estimate(const AbsorbingChain& chain, const SparseDistribution& mu0,
                                           std::size_t k_max);

/// Smallest k with ||Q^k 1||_inf < tolerance. Throws NumericalError if the
/// decay has not happened after `max_steps` steps.
std::size_t absorption_horizon(const AbsorbingChain& chain, double tolerance = 1e-12,
                               std::size_t max_steps = std::size_t{1} << 26);

/// Builds the STG reachable from the support of the document's initial law and
/// returns exact absorption probabilities.
AbsorptionResult analyze_exact(const ModelDocument& doc, std::size_t state_cap = kDefaultStateCap);

}  // namespace attrq
