#include "attrq/rewire.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "attrq/errors.hpp"
#include "attrq/stg.hpp"

namespace attrq {

std::vector<StateCode> cycle_exits(const RowSource& rows, std::span<const StateCode> cycle) {
  std::unordered_set<StateCode, StateCodeHash> members(cycle.begin(), cycle.end());
  std::unordered_set<StateCode, StateCodeHash> exits;
  Row row;
  for (const StateCode c : cycle) {
    rows(c, row);
    for (const auto& t : row)
      if (!members.count(t.target)) exits.insert(t.target);
  }
  std::vector<StateCode> out(exits.begin(), exits.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<RewireRecord> rewire(const RowSource& rows, std::span<const StateCode> cycle, std::size_t dense_limit) {
  RewireRecord rec;
  rec.cycle.assign(cycle.begin(), cycle.end());
  std::sort(rec.cycle.begin(), rec.cycle.end());
  rec.cycle.erase(std::unique(rec.cycle.begin(), rec.cycle.end()), rec.cycle.end());

  std::unordered_map<StateCode, Eigen::Index, StateCodeHash> in_cycle;
  for (std::size_t i = 0; i < rec.cycle.size(); ++i) in_cycle.emplace(rec.cycle[i], static_cast<Eigen::Index>(i));

  std::vector<Row> current(rec.cycle.size());
  std::unordered_map<StateCode, Eigen::Index, StateCodeHash> exit_index;
  for (std::size_t i = 0; i < rec.cycle.size(); ++i) {
    rows(rec.cycle[i], current[i]);
    for (const auto& t : current[i]) {
      if (in_cycle.count(t.target)) continue;
      ++rec.exit_transitions;
      exit_index.emplace(t.target, 0);
    }
  }
  if (exit_index.empty()) return std::nullopt;
  for (const auto& [code, idx] : exit_index) rec.exits.push_back(code);
  std::sort(rec.exits.begin(), rec.exits.end());
  for (std::size_t j = 0; j < rec.exits.size(); ++j) exit_index[rec.exits[j]] = static_cast<Eigen::Index>(j);

  const auto nc = static_cast<Eigen::Index>(rec.cycle.size());
  const auto nb = static_cast<Eigen::Index>(rec.exits.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nc, nb);
  Eigen::MatrixXd x;

  if (rec.cycle.size() <= dense_limit) {
    Eigen::MatrixXd id_minus_q = Eigen::MatrixXd::Identity(nc, nc);
    for (Eigen::Index i = 0; i < nc; ++i) {
      for (const auto& t : current[static_cast<std::size_t>(i)]) {
        if (auto it = in_cycle.find(t.target); it != in_cycle.end()) {
          id_minus_q(i, it->second) -= t.probability;
        } else {
          r(i, exit_index.at(t.target)) += t.probability;
        }
      }
    }
    x = id_minus_q.partialPivLu().solve(r);
  } else {
    std::vector<Eigen::Triplet<double>> entries;
    for (Eigen::Index i = 0; i < nc; ++i) {
      for (const auto& t : current[static_cast<std::size_t>(i)]) {
        if (auto it = in_cycle.find(t.target); it != in_cycle.end()) {
          entries.emplace_back(static_cast<int>(i), static_cast<int>(it->second), t.probability);
        } else {
          r(i, exit_index.at(t.target)) += t.probability;
        }
      }
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> q(nc, nc);
    q.setFromTriplets(entries.begin(), entries.end());
    // x = sum_k q^k r, stopped once the mass left inside the cycle is negligible.
    x = r;
    Eigen::MatrixXd term = r;
    Eigen::VectorXd inside = Eigen::VectorXd::Ones(nc);
    constexpr std::size_t kMaxTerms = std::size_t{1} << 24;
    std::size_t k = 0;
    for (; k < kMaxTerms; ++k) {
      inside = q * inside;
      if (inside.lpNorm<Eigen::Infinity>() < 1e-12) break;
      term = q * term;
      x += term;
    }
    if (k == kMaxTerms) throw NumericalError("cycle series did not converge; some state cannot leave the cycle");
  }

  if (!x.allFinite()) throw NumericalError("rewiring system is singular; some state cannot leave the cycle");
  rec.rows.resize(rec.cycle.size());
  for (Eigen::Index i = 0; i < nc; ++i) {
    double sum = 0.0;
    Row& row = rec.rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < nb; ++j) {
      const double p = x(i, j);
      if (p <= 0.0) continue;
      row.push_back(Transition{rec.exits[static_cast<std::size_t>(j)], p});
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw NumericalError("rewired row of state " + rec.cycle[static_cast<std::size_t>(i)].to_string() +
                           " sums to " + std::to_string(sum));
  }
  return rec;
}

std::vector<StateCode> extend_cycle(const RowSource& rows, std::span<const StateCode> cycle, std::size_t tau,
                                    bool inflationary, std::size_t max_states) {
  std::vector<StateCode> nodes;
  std::vector<std::size_t> depth;
  std::unordered_map<StateCode, std::uint32_t, StateCodeHash> local;
  std::deque<std::uint32_t> queue;
  auto discover = [&](StateCode s, std::size_t d) -> std::uint32_t {
    auto [it, inserted] = local.emplace(s, static_cast<std::uint32_t>(nodes.size()));
    if (inserted) {
      nodes.push_back(s);
      depth.push_back(d);
      queue.push_back(it->second);
    }
    return it->second;
  };
  for (const StateCode c : cycle) discover(c, 0);

  // Interior nodes discover their successors; frontier nodes (depth tau or
  // beyond the cap) only keep edges into the explored set.
  std::vector<std::vector<std::uint32_t>> adjacency;
  std::vector<std::uint32_t> frontier;
  Row row;
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    if ((!inflationary && depth[v] >= tau) || (inflationary && nodes.size() >= max_states)) {
      frontier.push_back(v);
      continue;
    }
    rows(nodes[v], row);
    std::vector<std::uint32_t> out;
    out.reserve(row.size());
    for (const auto& t : row) out.push_back(discover(t.target, depth[v] + 1));
    if (adjacency.size() < nodes.size()) adjacency.resize(nodes.size());
    adjacency[v] = std::move(out);
  }
  adjacency.resize(nodes.size());
  for (const std::uint32_t v : frontier) {
    rows(nodes[v], row);
    for (const auto& t : row)
      if (auto it = local.find(t.target); it != local.end()) adjacency[v].push_back(it->second);
  }

  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> targets;
  for (const auto& adj : adjacency) {
    targets.insert(targets.end(), adj.begin(), adj.end());
    offsets.push_back(targets.size());
  }
  const SccDecomposition dec = strongly_connected_components(nodes.size(), offsets, targets);
  const std::uint32_t scc = dec.component_id[local.at(cycle.front())];

  std::vector<StateCode> out(cycle.begin(), cycle.end());
  for (const auto i : dec.members[scc]) out.push_back(nodes[i]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace attrq
