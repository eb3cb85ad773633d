#include "attrq/stg.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <set>

#include "attrq/errors.hpp"

namespace attrq {
namespace {

[[noreturn]] void cap_exceeded(std::size_t cap) {
  throw CapacityError("state-space too large: more than " + std::to_string(cap) + " states (raise --state-cap)");
}

}  // namespace

std::optional<std::size_t> ExplicitSTG::index_of(StateCode code) const {
  auto it = index_.find(code);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ExplicitSTG ExplicitSTG::from_rows(
    const std::unordered_map<StateCode, std::vector<WeightedEdge>, StateCodeHash>& rows) {
  ExplicitSTG g;
  g.states_.reserve(rows.size());
  for (const auto& [code, row] : rows) g.states_.push_back(code);
  std::sort(g.states_.begin(), g.states_.end());
  for (std::size_t i = 0; i < g.states_.size(); ++i) g.index_.emplace(g.states_[i], static_cast<std::uint32_t>(i));
  for (const StateCode s : g.states_) {
    for (const auto& e : rows.at(s)) {
      auto it = g.index_.find(e.target);
      if (it == g.index_.end()) throw std::invalid_argument("edge target " + e.target.to_string() + " has no row");
      g.targets_.push_back(it->second);
      g.probs_.push_back(e.probability);
    }
    g.offsets_.push_back(g.targets_.size());
  }
  return g;
}

ExplicitSTG build_stg(const LogicalModel& model, std::span<const StateCode> roots, std::size_t cap) {
  ExplicitSTG g;
  std::vector<StateCode> order;
  std::deque<StateCode> queue;
  std::unordered_map<StateCode, std::vector<StateCode>, StateCodeHash> succ;
  auto discover = [&](StateCode c) {
    if (g.index_.count(c)) return;
    if (order.size() >= cap) cap_exceeded(cap);
    g.index_.emplace(c, 0);
    order.push_back(c);
    queue.push_back(c);
  };
  for (const StateCode r : roots) {
    if (r.value() >= model.state_count()) throw std::out_of_range("root state out of range");
    discover(r);
  }
  std::vector<StateCode> buf;
  State scratch;
  while (!queue.empty()) {
    const StateCode c = queue.front();
    queue.pop_front();
    model.successor_codes(c, buf, scratch);
    for (const StateCode w : buf) discover(w);
    succ.emplace(c, buf);
  }

  g.states_ = std::move(order);
  std::sort(g.states_.begin(), g.states_.end());
  for (std::size_t i = 0; i < g.states_.size(); ++i) g.index_[g.states_[i]] = static_cast<std::uint32_t>(i);
  for (const StateCode s : g.states_) {
    const auto& row = succ.at(s);
    const double p = row.empty() ? 0.0 : 1.0 / static_cast<double>(row.size());
    for (const StateCode w : row) {
      g.targets_.push_back(g.index_.at(w));
      g.probs_.push_back(p);
    }
    g.offsets_.push_back(g.targets_.size());
  }
  return g;
}

ExplicitSTG build_stg(const LogicalModel& model, const std::optional<State>& root, std::size_t cap) {
  if (root) {
    if (!model.is_valid(*root)) throw std::invalid_argument("root is not a valid state");
    const StateCode code = model.encode(*root);
    return build_stg(model, std::span<const StateCode>(&code, 1), cap);
  }
  if (model.state_count() > cap) cap_exceeded(cap);
  std::vector<StateCode> all;
  all.reserve(static_cast<std::size_t>(model.state_count()));
  for (StateCode::Rep c = 0; c < model.state_count(); ++c) all.emplace_back(c);
  return build_stg(model, all, cap);
}

SccDecomposition strongly_connected_components(std::size_t n, std::span<const std::size_t> offsets,
                                               std::span<const std::uint32_t> targets) {
  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kUnvisited);
  std::vector<std::uint32_t> lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  // (node, next edge offset)
  std::vector<std::pair<std::uint32_t, std::size_t>> call;

  SccDecomposition dec;
  dec.component_id.assign(n, kUnvisited);
  std::uint32_t counter = 0;

  for (std::uint32_t start = 0; start < n; ++start) {
    if (index[start] != kUnvisited) continue;
    call.emplace_back(start, offsets[start]);
    index[start] = lowlink[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;

    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge < offsets[v + 1]) {
        const std::uint32_t w = targets[edge++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, offsets[w]);
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      call.pop_back();
      if (!call.empty()) {
        const std::uint32_t parent = call.back().first;
        lowlink[parent] = std::min(lowlink[parent], lowlink[done]);
      }
      if (lowlink[done] == index[done]) {
        const auto id = static_cast<std::uint32_t>(dec.members.size());
        std::vector<std::uint32_t> members;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          dec.component_id[w] = id;
          members.push_back(w);
        } while (w != done);
        std::sort(members.begin(), members.end());
        dec.members.push_back(std::move(members));
      }
    }
  }

  dec.terminal.assign(dec.members.size(), true);
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::size_t e = offsets[v]; e < offsets[v + 1]; ++e)
      if (dec.component_id[targets[e]] != dec.component_id[v]) dec.terminal[dec.component_id[v]] = false;
  return dec;
}

SccDecomposition tarjan_scc(const ExplicitSTG& stg) {
  return strongly_connected_components(stg.size(), stg.offsets(), stg.targets());
}

std::vector<Attractor> attractors(const ExplicitSTG& stg, const SccDecomposition& dec) {
  std::vector<Attractor> out;
  for (std::size_t s = 0; s < dec.count(); ++s) {
    if (!dec.terminal[s]) continue;
    std::vector<StateCode> codes;
    codes.reserve(dec.members[s].size());
    for (const auto i : dec.members[s]) codes.push_back(stg.state(i));
    out.push_back(Attractor::from_members(std::move(codes)));
  }
  return out;
}

void write_quotient_dot(std::ostream& out, const ExplicitSTG& stg, const SccDecomposition& dec,
                        const LogicalModel* model) {
  out << "digraph quotient {\n";
  for (std::size_t s = 0; s < dec.count(); ++s) {
    const StateCode rep = stg.state(dec.members[s].front());
    out << "  s" << s << " [label=\"" << (model ? model->format_state(rep) : rep.to_string());
    if (dec.members[s].size() > 1) out << " (+" << dec.members[s].size() - 1 << ")";
    out << "\"" << (dec.terminal[s] ? ", shape=box" : "") << "];\n";
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> arcs;
  for (std::uint32_t v = 0; v < stg.size(); ++v)
    for (const auto w : stg.successors(v))
      if (dec.component_id[v] != dec.component_id[w]) arcs.emplace(dec.component_id[v], dec.component_id[w]);
  for (const auto& [a, b] : arcs) out << "  s" << a << " -> s" << b << ";\n";
  out << "}\n";
}

}  // namespace attrq
