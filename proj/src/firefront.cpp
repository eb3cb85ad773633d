#include "attrq/firefront.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace attrq {
namespace {

double mass(const SparseDistribution& d) {
  // Sum in key order so totals do not depend on hash layout.
  std::vector<std::pair<StateCode, double>> items(d.begin(), d.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (const auto& [code, p] : items) total += p;
  return total;
}

std::vector<StateCode> sorted_keys(const SparseDistribution& d) {
  std::vector<StateCode> keys;
  keys.reserve(d.size());
  for (const auto& [code, p] : d) keys.push_back(code);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

void FirefrontConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  if (max_iterations && *max_iterations < 1) throw std::invalid_argument("max iterations must be >= 1");
}

FirefrontState FirefrontState::start(StateCode initial, std::size_t oracle_count) {
  FirefrontState s;
  s.firefront.emplace(initial, 1.0);
  s.oracle_mass.assign(oracle_count, 0.0);
  return s;
}

double FirefrontState::firefront_mass() const { return mass(firefront); }
double FirefrontState::neglected_mass() const { return mass(neglected); }
double FirefrontState::attractor_mass() const {
  return mass(point_attractors) + std::accumulate(oracle_mass.begin(), oracle_mass.end(), 0.0);
}
std::size_t FirefrontState::attractor_count() const {
  return point_attractors.size() +
         static_cast<std::size_t>(std::count_if(oracle_mass.begin(), oracle_mass.end(), [](double m) { return m > 0.0; }));
}

FirefrontState firefront_step(const LogicalModel& model, std::span<const OracleSpec> oracles,
                              FirefrontState state, const FirefrontConfig& config) {
  FirefrontState next;
  next.neglected = std::move(state.neglected);
  next.point_attractors = std::move(state.point_attractors);
  next.oracle_mass = std::move(state.oracle_mass);
  next.oracle_mass.resize(oracles.size(), 0.0);
  next.iteration = state.iteration + 1;

  std::vector<StateCode> succ;
  std::vector<StateCode> stable_probe;
  State scratch;
  State probe;
  for (const StateCode v : sorted_keys(state.firefront)) {
    const double p = state.firefront.at(v);
    model.decode_into(v, probe);
    if (auto o = match_oracle(oracles, probe)) {
      next.oracle_mass[*o] += p;
      continue;
    }
    model.successor_codes(v, succ, scratch);
    if (succ.empty()) {
      next.point_attractors[v] += p;
      continue;
    }
    const double share = p / static_cast<double>(succ.size());
    for (const StateCode w : succ) {
      if (!oracles.empty()) {
        model.decode_into(w, probe);
        if (auto o = match_oracle(oracles, probe)) {
          next.oracle_mass[*o] += share;
          continue;
        }
      }
      if (auto a = next.point_attractors.find(w); a != next.point_attractors.end()) {
        a->second += share;
        continue;
      }
      if (auto f = next.firefront.find(w); f != next.firefront.end()) {
        f->second += share;
        continue;
      }
      // Stable states are absorbed on arrival.
      model.successor_codes(w, stable_probe, scratch);
      if (stable_probe.empty()) {
        next.point_attractors.emplace(w, share);
        continue;
      }
      auto n = next.neglected.find(w);
      const double total = (n == next.neglected.end() ? 0.0 : n->second) + share;
      if (total >= config.alpha) {
        if (n != next.neglected.end()) next.neglected.erase(n);
        next.firefront.emplace(w, total);
      } else if (n != next.neglected.end()) {
        n->second = total;
      } else {
        next.neglected.emplace(w, total);
      }
    }
  }
  return next;
}

FirefrontOutcome firefront_run(const ModelDocument& doc, const FirefrontConfig& config) {
  config.validate();
  if (!doc.initial.is_point_mass())
    throw std::invalid_argument("firefront needs a single initial state; sampled coordinates are not supported");
  const auto started = std::chrono::steady_clock::now();

  std::int64_t max_iterations = 0;
  if (config.max_iterations) {
    max_iterations = *config.max_iterations;
  } else {
    constexpr std::int64_t kCap = std::int64_t{1} << 31;
    const auto s = doc.model.state_count();
    max_iterations = s >= (StateCode::Rep{1} << 16) ? kCap : std::min<std::int64_t>(kCap, static_cast<std::int64_t>(s * s));
  }

  FirefrontOutcome out;
  FirefrontState st = FirefrontState::start(doc.model.encode(initial_state(doc)), doc.oracles.size());
  auto record = [&](const FirefrontState& s) {
    if (!config.trace) return;
    out.trace.push_back(FirefrontTraceRow{s.iteration, s.firefront.size(), s.neglected.size(), s.attractor_count(),
                                          s.firefront_mass(), s.neglected_mass(), s.attractor_mass()});
  };
  record(st);
  double pf = st.firefront_mass();
  while (pf > config.beta && st.iteration < max_iterations) {
    st = firefront_step(doc.model, doc.oracles, std::move(st), config);
    record(st);
    pf = st.firefront_mass();
  }

  const double pn = st.neglected_mass();
  AbsorptionResult& r = out.result;
  r.model = doc.name;
  r.method = "firefront";
  r.parameters = {{"alpha", config.alpha}, {"beta", config.beta}, {"max_iterations", max_iterations}};
  r.iterations = st.iteration;
  r.iteration_cap_reached = pf > config.beta;
  r.residual_probability = pf + pn;
  // Mass still in F or N can end up anywhere; it is at most beta + P(N)
  // when the run stopped on the beta condition.
  const double slack = pf + pn;
  for (const auto& [code, p] : st.point_attractors) {
    AttractorEstimate e;
    e.attractor = Attractor::point(code);
    e.probability = p;
    e.lower_bound = p;
    e.upper_bound = std::min(1.0, p + slack);
    r.attractors.push_back(std::move(e));
  }
  for (std::size_t o = 0; o < doc.oracles.size(); ++o) {
    if (st.oracle_mass[o] <= 0.0) continue;
    AttractorEstimate e;
    e.attractor = Attractor::from_oracle(doc.oracles[o].id, oracle_state_count(doc.model, doc.oracles[o]).value_or(0));
    e.probability = st.oracle_mass[o];
    e.lower_bound = st.oracle_mass[o];
    e.upper_bound = std::min(1.0, st.oracle_mass[o] + slack);
    r.attractors.push_back(std::move(e));
  }
  r.sort_attractors();
  out.final_state = std::move(st);
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

std::string emit_trace(std::span<const FirefrontTraceRow> rows) {
  std::ostringstream out;
  out << "iteration,F_size,N_size,A_size,P_F,P_N,P_A\n";
  char buf[96];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", row.firefront_mass, row.neglected_mass, row.attractor_mass);
    out << row.iteration << ',' << row.firefront_size << ',' << row.neglected_size << ',' << row.attractor_size << ','
        << buf << '\n';
  }
  return out.str();
}

}  // namespace attrq
