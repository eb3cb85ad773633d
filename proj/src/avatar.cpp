#include "attrq/avatar.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace attrq {

void AvatarConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (tau0 < 1) throw std::invalid_argument("tau must be >= 1");
  if (max_steps_per_run < 1) throw std::invalid_argument("max steps per run must be >= 1");
  if (keep_transients_max_exit_ratio < 0.0) throw std::invalid_argument("exit ratio threshold must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (max_extension_states < 1) throw std::invalid_argument("extension cap must be >= 1");
}

// ---------------------------------------------------------------------------

void Incarnation::reset(StateCode start) {
  if (started_) ++index_;
  started_ = true;
  visited_.clear();
  trail_.clear();
  visit(start);
}

void Incarnation::visit(StateCode state) {
  visited_.emplace(state, trail_.size());
  trail_.push_back(state);
}

std::optional<std::vector<StateCode>> Incarnation::detect_cycle(StateCode next) const {
  auto it = visited_.find(next);
  if (it == visited_.end()) return std::nullopt;
  return std::vector<StateCode>(trail_.begin() + static_cast<std::ptrdiff_t>(it->second), trail_.end());
}

// ---------------------------------------------------------------------------

StateCode CycleUnionFind::root(StateCode state) const {
  StateCode r = state;
  while (true) {
    auto it = parent_.find(r);
    if (it == parent_.end() || it->second == r) break;
    r = it->second;
  }
  // path compression
  while (state != r) {
    auto it = parent_.find(state);
    const StateCode up = it->second;
    it->second = r;
    state = up;
  }
  return r;
}

StateCode CycleUnionFind::find(StateCode state) const { return contains(state) ? root(state) : state; }

void CycleUnionFind::unite(std::span<const StateCode> states) {
  if (states.empty()) return;
  auto ensure = [&](StateCode s) {
    if (parent_.emplace(s, s).second) classes_[s] = {s};
  };
  ensure(states.front());
  StateCode a = root(states.front());
  for (const StateCode s : states.subspan(1)) {
    ensure(s);
    StateCode b = root(s);
    if (a == b) continue;
    if (classes_[a].size() < classes_[b].size()) std::swap(a, b);
    parent_[b] = a;
    auto& into = classes_[a];
    auto& from = classes_[b];
    into.insert(into.end(), from.begin(), from.end());
    classes_.erase(b);
  }
}

std::vector<StateCode> CycleUnionFind::members(StateCode state) const {
  if (!contains(state)) return {state};
  std::vector<StateCode> out = classes_.at(root(state));
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t signature(std::span<const StateCode> sorted_members) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (const StateCode s : sorted_members) {
    h ^= StateCodeHash{}(s);
    h = splitmix64(h);
  }
  return h;
}

}  // namespace

const Row* TransientCache::row(StateCode state) const {
  auto it = by_state_.find(state);
  if (it == by_state_.end()) return nullptr;
  return &records_[it->second.record]->rows[it->second.row];
}

const std::vector<StateCode>* TransientCache::cycle_of(StateCode state) const {
  auto it = by_state_.find(state);
  if (it == by_state_.end()) return nullptr;
  return &records_[it->second.record]->cycle;
}

bool TransientCache::contains(std::span<const StateCode> members) const {
  auto it = by_signature_.find(signature(members));
  if (it == by_signature_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](std::size_t r) {
    return std::equal(records_[r]->cycle.begin(), records_[r]->cycle.end(), members.begin(), members.end());
  });
}

bool TransientCache::insert(const RewireRecord& record) {
  if (contains(record.cycle)) return false;
  if (std::any_of(record.cycle.begin(), record.cycle.end(), [&](StateCode s) { return by_state_.count(s) != 0; }))
    return false;
  const std::size_t id = records_.size();
  records_.push_back(std::make_shared<const RewireRecord>(record));
  by_signature_[signature(record.cycle)].push_back(id);
  for (std::size_t i = 0; i < record.cycle.size(); ++i) by_state_.emplace(record.cycle[i], Slot{id, i});
  return true;
}

const std::shared_ptr<const Attractor>* AttractorRegistry::find(StateCode state) const {
  auto it = by_state_.find(state);
  if (it == by_state_.end()) return nullptr;
  return &attractors_[it->second];
}

void AttractorRegistry::add(const std::shared_ptr<const Attractor>& attractor) {
  if (attractor->members.empty() || find(attractor->members.front())) return;
  const std::size_t id = attractors_.size();
  attractors_.push_back(attractor);
  for (const StateCode s : attractor->members) by_state_.emplace(s, id);
}

// ---------------------------------------------------------------------------

SimulationOutcome avatar_simulation(const SimulationContext& ctx, StateCode start, RandomStream& rng) {
  const LogicalModel& model = ctx.model;
  const AvatarConfig& cfg = ctx.config;

  std::unordered_map<StateCode, Row, StateCodeHash> overrides;
  std::size_t explicit_transitions = 0;
  std::vector<StateCode> succ;
  State scratch;
  State probe;

  const RowSource rows = [&](StateCode s, Row& out) {
    if (auto it = overrides.find(s); it != overrides.end()) {
      out = it->second;
      return;
    }
    if (const Row* cached = ctx.cache.row(s)) {
      out = *cached;
      return;
    }
    model.successor_codes(s, succ, scratch);
    out.clear();
    const double p = succ.empty() ? 0.0 : 1.0 / static_cast<double>(succ.size());
    for (const StateCode w : succ) out.push_back(Transition{w, p});
  };

  SimulationOutcome result;
  auto user_oracle = [&](StateCode s) -> std::optional<std::size_t> {
    if (ctx.oracles.empty()) return std::nullopt;
    model.decode_into(s, probe);
    return match_oracle(ctx.oracles, probe);
  };
  auto stop_at_known = [&](StateCode s) {
    if (auto o = user_oracle(s)) {
      result.oracle = *o;
      // Size is filled in once per oracle by the caller.
      result.attractor = std::make_shared<const Attractor>(Attractor::from_oracle(ctx.oracles[*o].id, 0));
      return true;
    }
    if (const auto* known = ctx.registry.find(s)) {
      result.attractor = *known;
      return true;
    }
    return false;
  };

  CycleUnionFind classes;
  auto close_attractor = [&](StateCode s) {
    // Cached rows stand for dismantled cycles of earlier runs; their members
    // belong to the same class as the states that used them.
    std::vector<StateCode> members = classes.members(s);
    for (bool grown = true; grown;) {
      grown = false;
      for (const StateCode m : members) {
        const auto* cycle = ctx.cache.cycle_of(m);
        if (cycle && classes.find(cycle->front()) != classes.find(s)) {
          std::vector<StateCode> link(*cycle);
          link.push_back(s);
          classes.unite(link);
          grown = true;
        }
      }
      if (grown) members = classes.members(s);
    }
    result.attractor = std::make_shared<const Attractor>(Attractor::from_members(std::move(members)));
  };

  Incarnation incarnation;
  std::size_t tau = cfg.tau0;
  StateCode v = start;
  if (stop_at_known(v)) return result;
  incarnation.reset(v);

  Row row;
  while (true) {
    rows(v, row);
    if (row.empty()) {
      close_attractor(v);
      result.discovered = result.attractor->kind == AttractorKind::kComplex;
      break;
    }
    double u = rng.uniform();
    StateCode next = row.back().target;
    for (const auto& t : row) {
      if (u < t.probability) {
        next = t.target;
        break;
      }
      u -= t.probability;
    }
    if (++result.steps > cfg.max_steps_per_run) {
      result.status = SimulationOutcome::Status::kAborted;
      result.attractor.reset();
      break;
    }
    if (stop_at_known(next)) break;

    if (auto cycle = incarnation.detect_cycle(next)) {
      const bool inflationary =
          cfg.inflationary == InflationaryMode::kOn ||
          (cfg.inflationary == InflationaryMode::kAuto &&
           (ctx.small_state_space || explicit_transitions > cfg.explicit_transition_budget));
      const std::vector<StateCode> extended = extend_cycle(rows, *cycle, tau, inflationary, cfg.max_extension_states);
      const bool pristine = std::none_of(extended.begin(), extended.end(), [&](StateCode s) {
        return overrides.count(s) != 0 || ctx.cache.row(s) != nullptr;
      });
      std::optional<RewireRecord> record = rewire(rows, extended, cfg.dense_solve_limit);
      classes.unite(extended);
      if (!record) {
        // Closed set: the walk is inside a terminal SCC.
        close_attractor(next);
        result.discovered = result.attractor->kind == AttractorKind::kComplex;
        break;
      }
      if (extended.size() >= cfg.min_cycle_to_rewire) {
        if (cfg.keep_transients && pristine && extended.size() >= cfg.keep_transients_min_size &&
            record->exit_ratio() < cfg.keep_transients_max_exit_ratio)
          result.cache_candidates.push_back(*record);
        for (std::size_t i = 0; i < record->cycle.size(); ++i) {
          explicit_transitions += record->rows[i].size();
          overrides[record->cycle[i]] = std::move(record->rows[i]);
        }
        tau *= 2;
      }
      incarnation.reset(next);
    } else {
      incarnation.visit(next);
    }
    v = next;
  }
  result.incarnations = static_cast<std::int64_t>(incarnation.index());
  return result;
}

// ---------------------------------------------------------------------------

namespace {

struct AggregateKey {
  std::string oracle;
  std::vector<StateCode> projected;

  bool operator<(const AggregateKey& o) const { return std::tie(oracle, projected) < std::tie(o.oracle, o.projected); }
};

struct Aggregate {
  std::shared_ptr<const Attractor> attractor;
  std::int64_t hits = 0;
  double steps = 0.0;
  std::map<std::vector<Level>, std::int64_t> inputs;
};

}  // namespace

AvatarOutcome avatar_run(const ModelDocument& doc, const AvatarConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const LogicalModel& model = doc.model;

  std::vector<std::size_t> sampled_inputs;
  for (const std::size_t i : doc.initial.sampled)
    if (model.is_input(i)) sampled_inputs.push_back(i);

  auto project = [&](const Attractor& a) {
    std::vector<StateCode> out;
    out.reserve(a.members.size());
    State s;
    for (const StateCode m : a.members) {
      if (sampled_inputs.empty()) {
        out.push_back(m);
        continue;
      }
      model.decode_into(m, s);
      for (const std::size_t i : sampled_inputs) s[i] = 0;
      out.push_back(model.encode(s));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  TransientCache cache;
  AttractorRegistry registry;
  const bool small = model.state_count() < static_cast<StateCode::Rep>(config.small_stg_threshold);
  const State base = initial_state(doc);

  std::map<AggregateKey, Aggregate> aggregates;
  struct RunRecord {
    std::optional<AggregateKey> key;
    std::int64_t steps;
    std::int64_t incarnations;
  };
  std::vector<RunRecord> run_records;
  if (config.trace) run_records.reserve(static_cast<std::size_t>(config.runs));
  std::int64_t aborted = 0;

  const unsigned threads = std::max(1u, config.threads);
  for (std::int64_t first = 0; first < config.runs; first += static_cast<std::int64_t>(config.batch_size)) {
    const std::int64_t last = std::min(config.runs, first + static_cast<std::int64_t>(config.batch_size));
    const auto n = static_cast<std::size_t>(last - first);
    std::vector<SimulationOutcome> outcomes(n);
    std::vector<State> starts(n);
    const SimulationContext ctx{model, doc.oracles, config, cache, registry, small};

    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
      while (!failed.load()) {
        const std::size_t k = cursor.fetch_add(1);
        if (k >= n) break;
        try {
          RandomStream rng(config.seed, static_cast<std::uint64_t>(first) + k);
          State s = base;
          for (const std::size_t i : doc.initial.sampled)
            s[i] = static_cast<Level>(rng.below(std::uint64_t{model.component(i).max_level} + 1));
          outcomes[k] = avatar_simulation(ctx, model.encode(s), rng);
          starts[k] = std::move(s);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    };
    if (threads == 1 || n == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Merge in run order.
    for (std::size_t k = 0; k < n; ++k) {
      SimulationOutcome& o = outcomes[k];
      if (o.status == SimulationOutcome::Status::kAborted) {
        ++aborted;
        if (config.trace) run_records.push_back({std::nullopt, o.steps, o.incarnations});
        continue;
      }
      AggregateKey key{o.attractor->oracle, o.attractor->oracle.empty() ? project(*o.attractor) : std::vector<StateCode>{}};
      auto& agg = aggregates[key];
      if (!agg.attractor) agg.attractor = o.attractor;
      ++agg.hits;
      agg.steps += static_cast<double>(o.steps);
      if (!sampled_inputs.empty()) {
        std::vector<Level> valuation;
        for (const std::size_t i : sampled_inputs) valuation.push_back(starts[k][i]);
        ++agg.inputs[valuation];
      }
      if (config.create_oracles && o.discovered) registry.add(o.attractor);
      for (const auto& rec : o.cache_candidates) cache.insert(rec);
      if (config.trace) run_records.push_back({std::move(key), o.steps, o.incarnations});
    }
  }

  AvatarOutcome out;
  AbsorptionResult& r = out.result;
  r.model = doc.name;
  r.method = "avatar";
  const char* mode = config.inflationary == InflationaryMode::kOn    ? "on"
                     : config.inflationary == InflationaryMode::kOff ? "off"
                                                                     : "auto";
  r.parameters = {{"runs", config.runs},
                  {"seed", static_cast<std::int64_t>(config.seed)},
                  {"tau", static_cast<std::int64_t>(config.tau0)},
                  {"min_rewire", static_cast<std::int64_t>(config.min_cycle_to_rewire)},
                  {"inflationary", std::string(mode)},
                  {"keep_transients", static_cast<std::int64_t>(config.keep_transients)}};
  r.runs = config.runs;
  r.aborted_runs = aborted;
  const double runs = static_cast<double>(config.runs);

  std::vector<const AggregateKey*> keys;
  for (const auto& [key, agg] : aggregates) {
    keys.push_back(&key);
    AttractorEstimate e;
    e.attractor = *agg.attractor;
    if (!key.oracle.empty()) {
      const auto it = std::find_if(doc.oracles.begin(), doc.oracles.end(),
                                   [&](const OracleSpec& o) { return o.id == key.oracle; });
      e.attractor.size = oracle_state_count(model, *it).value_or(0);
    }
    e.probability = static_cast<double>(agg.hits) / runs;
    e.std_error = std::sqrt(e.probability * (1.0 - e.probability) / runs);
    e.avg_depth = agg.steps / static_cast<double>(agg.hits);
    for (const auto& [valuation, hits] : agg.inputs) {
      InputBreakdown b;
      for (std::size_t j = 0; j < sampled_inputs.size(); ++j)
        b.valuation.emplace_back(model.component(sampled_inputs[j]).name, valuation[j]);
      b.hits = static_cast<std::uint64_t>(hits);
      b.probability = static_cast<double>(hits) / runs;
      e.inputs.push_back(std::move(b));
    }
    r.attractors.push_back(std::move(e));
  }

  r.sort_attractors();
  if (config.trace) {
    // Ids follow the sorted order of the report.
    std::map<AggregateKey, std::string> ids;
    for (const AggregateKey* key : keys) {
      const Attractor& a = *aggregates.at(*key).attractor;
      for (std::size_t i = 0; i < r.attractors.size(); ++i)
        if (r.attractors[i].attractor.members == a.members && r.attractors[i].attractor.oracle == a.oracle) ids[*key] = attractor_id(r.attractors[i], i);
    }
    for (std::size_t k = 0; k < run_records.size(); ++k) {
      const auto& rec = run_records[k];
      out.trace.push_back(AvatarTraceRow{static_cast<std::int64_t>(k), rec.key ? ids.at(*rec.key) : "aborted",
                                         rec.steps, rec.incarnations});
    }
  }

  out.cached_transients = cache.size();
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

std::string emit_avatar_trace(std::span<const AvatarTraceRow> rows) {
  std::ostringstream out;
  out << "run,attractor,steps,incarnations\n";
  for (const auto& row : rows) out << row.run << ',' << row.attractor << ',' << row.steps << ',' << row.incarnations << '\n';
  return out.str();
}

}  // namespace attrq
