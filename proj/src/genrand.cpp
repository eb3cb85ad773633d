#include "attrq/genrand.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace attrq {

LogicalModel generate_random_model(std::size_t n, std::size_t k, RandomStream& rng) {
  if (k < 1 || k > n) throw std::invalid_argument("regulators per component must be in [1, n]");
  if (k > 16) throw std::invalid_argument("at most 16 regulators per component are supported");

  std::vector<ComponentDef> components(n);
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) {
    components[i].name = "x" + std::to_string(i);
    components[i].max_level = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) std::swap(pool[j], pool[j + rng.below(n - j)]);
    std::vector<std::size_t> regulators(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(regulators.begin(), regulators.end());

    const std::size_t rows = std::size_t{1} << k;
    for (std::size_t row = 0; row < rows; ++row) {
      if (rng.below(2) == 0) continue;
      BoolExpr term;
      for (std::size_t j = 0; j < k; ++j) {
        BoolExpr lit = BoolExpr::atom(regulators[j], Comparator::kEq, 1);
        if (((row >> j) & 1U) == 0) lit = BoolExpr::negate(std::move(lit));
        term = term.empty() ? std::move(lit) : BoolExpr::conj(std::move(term), std::move(lit));
      }
      components[i].rules.push_back(TargetRule{1, std::move(term)});
    }
  }
  return LogicalModel(std::move(components), std::vector<bool>(n, false));
}

bool filter_multistable(const LogicalModel& model, std::size_t cap) {
  const ExplicitSTG stg = build_stg(model, std::optional<State>{}, cap);
  const SccDecomposition dec = tarjan_scc(stg);
  std::size_t count = 0;
  for (const bool t : dec.terminal)
    if (t && ++count >= 2) return true;
  return false;
}

}  // namespace attrq
