#include "attrq/markov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "attrq/errors.hpp"

namespace attrq {
namespace {

using Triplet = Eigen::Triplet<double>;

struct SplitMu0 {
  Eigen::VectorXd transient;
  std::vector<double> absorbed;
};

SplitMu0 split_mu0(const AbsorbingChain& chain, const SparseDistribution& mu0) {
  SplitMu0 out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chain.transient.size())),
               std::vector<double>(chain.classes.size(), 0.0)};
  for (const auto& [code, mass] : mu0) {
    if (auto it = chain.transient_index.find(code); it != chain.transient_index.end()) {
      out.transient[it->second] += mass;
    } else if (auto jt = chain.class_index.find(code); jt != chain.class_index.end()) {
      out.absorbed[jt->second] += mass;
    } else {
      throw std::invalid_argument("initial mass on state " + code.to_string() + " outside the chain");
    }
  }
  return out;
}

}  // namespace

AbsorbingChain build_chain(const ExplicitSTG& stg, const SccDecomposition& dec) {
  AbsorbingChain chain;
  std::vector<std::int64_t> class_of_scc(dec.count(), -1);
  for (std::size_t s = 0; s < dec.count(); ++s) {
    if (!dec.terminal[s]) continue;
    class_of_scc[s] = static_cast<std::int64_t>(chain.classes.size());
    std::vector<StateCode> codes;
    for (const auto i : dec.members[s]) codes.push_back(stg.state(i));
    chain.classes.push_back(Attractor::from_members(std::move(codes)));
  }
  // Classes ordered by smallest member for deterministic column order.
  std::vector<std::size_t> perm(chain.classes.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return chain.classes[a].members.front() < chain.classes[b].members.front();
  });
  std::vector<std::size_t> rank(perm.size());
  for (std::size_t r = 0; r < perm.size(); ++r) rank[perm[r]] = r;
  {
    std::vector<Attractor> sorted;
    for (const std::size_t i : perm) sorted.push_back(std::move(chain.classes[i]));
    chain.classes = std::move(sorted);
  }
  for (auto& c : class_of_scc)
    if (c >= 0) c = static_cast<std::int64_t>(rank[static_cast<std::size_t>(c)]);

  for (std::size_t i = 0; i < stg.size(); ++i) {
    const auto c = class_of_scc[dec.component_id[i]];
    if (c >= 0) {
      chain.class_index.emplace(stg.state(i), static_cast<std::uint32_t>(c));
    } else {
      chain.transient_index.emplace(stg.state(i), static_cast<std::uint32_t>(chain.transient.size()));
      chain.transient.push_back(stg.state(i));
    }
  }

  std::vector<Triplet> q_entries;
  std::vector<Triplet> p_entries;
  for (std::size_t i = 0; i < stg.size(); ++i) {
    auto row = chain.transient_index.find(stg.state(i));
    if (row == chain.transient_index.end()) continue;
    const auto succ = stg.successors(i);
    const auto w = stg.weights(i);
    for (std::size_t e = 0; e < succ.size(); ++e) {
      const StateCode target = stg.state(succ[e]);
      const auto c = class_of_scc[dec.component_id[succ[e]]];
      if (c >= 0) {
        p_entries.emplace_back(static_cast<int>(row->second), static_cast<int>(c), w[e]);
      } else {
        q_entries.emplace_back(static_cast<int>(row->second), static_cast<int>(chain.transient_index.at(target)), w[e]);
      }
    }
  }
  const auto nt = static_cast<Eigen::Index>(chain.transient.size());
  chain.q.resize(nt, nt);
  chain.q.setFromTriplets(q_entries.begin(), q_entries.end());
  chain.p.resize(nt, static_cast<Eigen::Index>(chain.classes.size()));
  chain.p.setFromTriplets(p_entries.begin(), p_entries.end());
  return chain;
}

AbsorptionResult absorption_probabilities(const AbsorbingChain& chain, const SparseDistribution& mu0) {
  const SplitMu0 start = split_mu0(chain, mu0);
  const auto nt = static_cast<Eigen::Index>(chain.transient.size());
  const auto theta = static_cast<Eigen::Index>(chain.classes.size());

  std::vector<double> prob = start.absorbed;
  std::vector<double> depth_mass(chain.classes.size(), 0.0);

  if (nt > 0 && start.transient.lpNorm<1>() > 0.0) {
    Eigen::SparseMatrix<double> id_minus_q(nt, nt);
    id_minus_q.setIdentity();
    id_minus_q -= Eigen::SparseMatrix<double>(chain.q);
    id_minus_q.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(id_minus_q);
    lu.factorize(id_minus_q);
    if (lu.info() != Eigen::Success) throw NumericalError("Id - Q is singular: " + lu.lastErrorMessage());

    const Eigen::MatrixXd p_dense = Eigen::MatrixXd(chain.p);
    const Eigen::MatrixXd h = lu.solve(p_dense);
    if (lu.info() != Eigen::Success || !h.allFinite()) throw NumericalError("absorption solve failed");
    const double resid = (id_minus_q * h - p_dense).lpNorm<Eigen::Infinity>();
    if (resid > 1e-9) throw NumericalError("absorption solve residual " + std::to_string(resid) + " too large");

    // E_u[T 1{X_inf = a}] = ((Id - Q)^-1 h_a)(u)
    const Eigen::MatrixXd g = lu.solve(h);
    for (Eigen::Index a = 0; a < theta; ++a) {
      prob[static_cast<std::size_t>(a)] += start.transient.dot(h.col(a));
      depth_mass[static_cast<std::size_t>(a)] += start.transient.dot(g.col(a));
    }
  }

  AbsorptionResult result;
  result.method = "exact";
  result.residual_probability = 0.0;
  for (std::size_t a = 0; a < chain.classes.size(); ++a) {
    if (prob[a] <= 0.0) continue;
    AttractorEstimate e;
    e.attractor = chain.classes[a];
    e.probability = std::clamp(prob[a], 0.0, 1.0);
    e.avg_depth = depth_mass[a] / prob[a];
    result.attractors.push_back(std::move(e));
  }
  result.sort_attractors();
  return result;
}

AbsorptionResult power_absorption_estimate(const AbsorbingChain& chain, const SparseDistribution& mu0,
                                           std::size_t k_max) {
  const SplitMu0 start = split_mu0(chain, mu0);
  // Row vectors carried as column vectors of the transposed products.
  Eigen::VectorXd x = start.transient;
  Eigen::VectorXd absorbed = Eigen::Map<const Eigen::VectorXd>(start.absorbed.data(),
                                                               static_cast<Eigen::Index>(start.absorbed.size()));
  const Eigen::SparseMatrix<double> qt = chain.q.transpose();
  const Eigen::SparseMatrix<double> pt = chain.p.transpose();
  for (std::size_t k = 0; k < k_max && x.size() > 0; ++k) {
    absorbed += pt * x;
    x = qt * x;
  }

  AbsorptionResult result;
  result.method = "power";
  result.iterations = static_cast<std::int64_t>(k_max);
  result.residual_probability = x.sum();
  for (std::size_t a = 0; a < chain.classes.size(); ++a) {
    if (absorbed[static_cast<Eigen::Index>(a)] <= 0.0) continue;
    AttractorEstimate e;
    e.attractor = chain.classes[a];
    e.probability = absorbed[static_cast<Eigen::Index>(a)];
    result.attractors.push_back(std::move(e));
  }
  result.sort_attractors();
  return result;
}

std::size_t absorption_horizon(const AbsorbingChain& chain, double tolerance, std::size_t max_steps) {
  Eigen::VectorXd z = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(chain.transient.size()));
  for (std::size_t k = 0; k <= max_steps; ++k) {
    if (z.size() == 0 || z.lpNorm<Eigen::Infinity>() < tolerance) return k;
    z = chain.q * z;
  }
  throw NumericalError("transient mass did not decay below tolerance within " + std::to_string(max_steps) + " steps");
}

AbsorptionResult analyze_exact(const ModelDocument& doc, std::size_t state_cap) {
  const auto started = std::chrono::steady_clock::now();
  const SparseDistribution mu0 = initial_distribution(doc, state_cap);
  std::vector<StateCode> roots;
  roots.reserve(mu0.size());
  for (const auto& [code, mass] : mu0) roots.push_back(code);
  std::sort(roots.begin(), roots.end());

  const ExplicitSTG stg = build_stg(doc.model, roots, state_cap);
  const SccDecomposition dec = tarjan_scc(stg);
  const AbsorbingChain chain = build_chain(stg, dec);
  AbsorptionResult result = absorption_probabilities(chain, mu0);
  result.model = doc.name;
  result.parameters = {{"state_cap", static_cast<std::int64_t>(state_cap)},
                       {"reachable_states", static_cast<std::int64_t>(stg.size())},
                       {"transient_states", static_cast<std::int64_t>(chain.transient.size())}};
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace attrq
