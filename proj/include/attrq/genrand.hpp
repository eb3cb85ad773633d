#pragma once

#include <cstddef>

#include "attrq/model.hpp"
#include "attrq/random.hpp"
#include "attrq/stg.hpp"

namespace attrq {

/// Random Boolean model with `n` components named x0..x{n-1}. Each component
/// gets `k` distinct regulators and a uniformly drawn truth table over them,
/// written as one TARGET 1 rule per minterm. Requires 1 <= k <= n.
LogicalModel generate_random_model(std::size_t n, std::size_t k, RandomStream& rng);

/// True when the full state space of `model` has at least two attractors.
/// Throws CapacityError above `cap` states.
bool filter_multistable(const LogicalModel& model, std::size_t cap = kDefaultStateCap);

}  // namespace attrq
