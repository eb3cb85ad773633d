#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "attrq/model.hpp"
#include "attrq/parser.hpp"
#include "attrq/random.hpp"
#include "attrq/result.hpp"
#include "attrq/rewire.hpp"
#include "attrq/state.hpp"

namespace attrq {

enum class InflationaryMode { kAuto, kOn, kOff };

struct AvatarConfig {
  std::int64_t runs = 10000;
  /// Initial extension depth; doubled after every rewiring within a run.
  std::size_t tau0 = 3;
  /// Extended cycles smaller than this are not rewired.
  std::size_t min_cycle_to_rewire = 4;
  /// Explicit (rewired) transitions in a run beyond which inflationary mode starts.
  std::size_t explicit_transition_budget = 100000;
  /// Models with |S| below this always run in inflationary mode.
  std::uint64_t small_stg_threshold = 1024;
  bool keep_transients = true;
  std::size_t keep_transients_min_size = 32;
  double keep_transients_max_exit_ratio = 1.0;
  std::int64_t max_steps_per_run = 10'000'000;
  /// Exploration cap of a single inflationary extension.
  std::size_t max_extension_states = std::size_t{1} << 20;
  std::size_t dense_solve_limit = 2048;
  InflationaryMode inflationary = InflationaryMode::kAuto;
  /// Discovered complex attractors become oracles for later runs.
  bool create_oracles = true;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Runs per scheduling batch. Oracles and cached transients found in a
  /// batch become visible from the next batch on, so results do not depend
  /// on the thread count.
  std::size_t batch_size = 256;
  bool trace = false;

  void validate() const;
};

/// Visit bookkeeping of the current incarnation of a walk.
class Incarnation {
 public:
  /// Starts a new incarnation whose first visited state is `start`.
  void reset(StateCode start);
  void visit(StateCode state);
  /// States visited since the first visit of `next` (inclusive) if `next`
  /// was already visited in this incarnation.
  std::optional<std::vector<StateCode>> detect_cycle(StateCode next) const;

  std::size_t index() const noexcept { return index_; }
  std::span<const StateCode> trail() const noexcept { return trail_; }

 private:
  std::size_t index_ = 0;
  bool started_ = false;
  std::unordered_map<StateCode, std::size_t, StateCodeHash> visited_;
  std::vector<StateCode> trail_;
};

/// Disjoint sets of states that shared a cycle during one simulation.
class CycleUnionFind {
 public:
  void unite(std::span<const StateCode> states);
  StateCode find(StateCode state) const;
  /// Sorted members of the class of `state` ({state} if never united).
  std::vector<StateCode> members(StateCode state) const;
  bool contains(StateCode state) const { return parent_.count(state) != 0; }

 private:
  StateCode root(StateCode state) const;

  mutable std::unordered_map<StateCode, StateCode, StateCodeHash> parent_;
  std::unordered_map<StateCode, std::vector<StateCode>, StateCodeHash> classes_;
};

/// Rewired transient SCCs kept across simulations, keyed by member set.
class TransientCache {
 public:
  /// Row of `state` if it belongs to a cached record.
  const Row* row(StateCode state) const;
  /// Cycle of the record containing `state`, if any.
  const std::vector<StateCode>* cycle_of(StateCode state) const;
  bool contains(std::span<const StateCode> members) const;
  /// Inserts a record unless the same member set is cached already or any
  /// member belongs to another record. Returns true when inserted.
  bool insert(const RewireRecord& record);

  std::size_t size() const noexcept { return records_.size(); }

 private:
  struct Slot {
    std::size_t record;
    std::size_t row;
  };
  std::vector<std::shared_ptr<const RewireRecord>> records_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_signature_;
  std::unordered_map<StateCode, Slot, StateCodeHash> by_state_;
};

/// Complex attractors discovered so far, recognised by exact membership.
class AttractorRegistry {
 public:
  const std::shared_ptr<const Attractor>* find(StateCode state) const;
  void add(const std::shared_ptr<const Attractor>& attractor);
  std::size_t size() const noexcept { return attractors_.size(); }

 private:
  std::vector<std::shared_ptr<const Attractor>> attractors_;
  std::unordered_map<StateCode, std::size_t, StateCodeHash> by_state_;
};

struct SimulationOutcome {
  enum class Status { kAttractor, kAborted };

  Status status = Status::kAttractor;
  std::shared_ptr<const Attractor> attractor;
  /// Index of the user oracle that stopped the walk, if any.
  std::optional<std::size_t> oracle;
  /// True when this run closed a complex attractor itself.
  bool discovered = false;
  std::int64_t steps = 0;
  std::int64_t incarnations = 0;
  /// Rewired transients eligible for the shared cache.
  std::vector<RewireRecord> cache_candidates;
};

/// Read-only context shared by the simulations of one batch.
struct SimulationContext {
  const LogicalModel& model;
  std::span<const OracleSpec> oracles;
  const AvatarConfig& config;
  const TransientCache& cache;
  const AttractorRegistry& registry;
  bool small_state_space = false;
};

/// One random walk with cycle detection, rewiring and C* reconstruction.
SimulationOutcome avatar_simulation(const SimulationContext& context, StateCode start, RandomStream& rng);

struct AvatarTraceRow {
  std::int64_t run = 0;
  std::string attractor;
  std::int64_t steps = 0;
  std::int64_t incarnations = 0;
};

struct AvatarOutcome {
  AbsorptionResult result;
  std::vector<AvatarTraceRow> trace;
  std::size_t cached_transients = 0;
};

/// Runs `config.runs` simulations from the document's initial law and
/// estimates attractor probabilities (hits / runs) with binomial standard
/// errors and mean depths.
AvatarOutcome avatar_run(const ModelDocument& doc, const AvatarConfig& config);

/// CSV with columns run,attractor,steps,incarnations.
std::string emit_avatar_trace(std::span<const AvatarTraceRow> rows);

}  // namespace attrq
