#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attrq/state.hpp"

namespace attrq {

enum class Comparator { kEq, kLe, kGe };

/// Boolean condition over component levels: atoms `comp op level` combined
/// with NOT, AND and OR. Stored as a flat node array, root last.
class BoolExpr {
 public:
  enum class Kind { kAtom, kNot, kAnd, kOr };

  struct Node {
    Kind kind = Kind::kAtom;
    std::size_t component = 0;
    Comparator comparator = Comparator::kEq;
    Level level = 0;
    std::size_t lhs = 0;
    std::size_t rhs = 0;

    bool operator==(const Node&) const = default;
  };

  static BoolExpr atom(std::size_t component, Comparator comparator, Level level);
  static BoolExpr negate(BoolExpr operand);
  static BoolExpr conj(BoolExpr lhs, BoolExpr rhs);
  static BoolExpr disj(BoolExpr lhs, BoolExpr rhs);

  bool eval(std::span<const Level> state) const;

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t root() const noexcept { return nodes_.size() - 1; }
  const Node& node(std::size_t index) const { return nodes_[index]; }
  std::span<const Node> nodes() const noexcept { return nodes_; }

  bool operator==(const BoolExpr&) const = default;

 private:
  static BoolExpr binary(Kind kind, BoolExpr lhs, BoolExpr rhs);
  bool eval_node(std::size_t index, std::span<const Level> state) const;

  std::vector<Node> nodes_;
};

struct TargetRule {
  Level target = 0;
  BoolExpr condition;

  bool operator==(const TargetRule&) const = default;
};

struct ComponentDef {
  std::string name;
  Level max_level = 1;
  /// First matching rule gives the target; no match means target 0.
  std::vector<TargetRule> rules;

  bool operator==(const ComponentDef&) const = default;
};

/// Logical regulatory graph: components, their level domains and target
/// functions. Immutable once constructed; every query is const and
/// thread-safe.
class LogicalModel {
 public:
  /// Validates names, levels and regulator references; throws ModelError on
  /// inconsistency and CapacityError when the state space does not fit the
  /// 128-bit code.
  LogicalModel(std::vector<ComponentDef> components, std::vector<bool> input_flags);

  std::size_t size() const noexcept { return components_.size(); }
  const ComponentDef& component(std::size_t i) const { return components_[i]; }
  std::span<const ComponentDef> components() const noexcept { return components_; }
  bool is_input(std::size_t i) const { return input_flags_[i]; }
  const std::vector<bool>& input_flags() const noexcept { return input_flags_; }
  std::optional<std::size_t> find(const std::string& name) const;

  /// |S| = prod (M_i + 1).
  StateCode::Rep state_count() const noexcept { return state_count_; }
  StateCode::Rep stride(std::size_t i) const { return strides_[i]; }

  StateCode encode(std::span<const Level> state) const;
  /// Throws std::out_of_range when code >= |S|.
  State decode(StateCode code) const;
  void decode_into(StateCode code, State& out) const;
  bool is_valid(std::span<const Level> state) const;

  /// K_i(v); inputs return v_i.
  Level eval_target(std::size_t i, std::span<const Level> state) const;

  /// Asynchronous successors: one unit step toward K_i(v) per component with
  /// K_i(v) != v_i, ordered by component index.
  std::vector<State> successors(std::span<const Level> state) const;

  /// Same as successors() but on codes; `scratch` avoids reallocation.
  void successor_codes(StateCode code, std::vector<StateCode>& out, State& scratch) const;
  std::vector<StateCode> successor_codes(StateCode code) const;

  /// 1/|Succ(v)|; throws std::invalid_argument if w is not a successor of v.
  double transition_probability(std::span<const Level> v, std::span<const Level> w) const;

  /// Level string such as "0110" (levels > 9 are bracketed, e.g. "0[12]1").
  std::string format_state(std::span<const Level> state) const;
  std::string format_state(StateCode code) const;

  bool operator==(const LogicalModel& other) const {
    return components_ == other.components_ && input_flags_ == other.input_flags_;
  }

 private:
  std::vector<ComponentDef> components_;
  std::vector<bool> input_flags_;
  std::vector<StateCode::Rep> strides_;
  StateCode::Rep state_count_ = 1;
};

}  // namespace attrq
