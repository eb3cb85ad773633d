#include "attrq/model.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "attrq/errors.hpp"

namespace attrq {

std::string StateCode::to_string() const {
  if (value_ == 0) return "0";
  std::string digits;
  for (Rep v = value_; v != 0; v /= 10) digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
  std::reverse(digits.begin(), digits.end());
  return digits;
}

BoolExpr BoolExpr::atom(std::size_t component, Comparator comparator, Level level) {
  BoolExpr e;
  e.nodes_.push_back(Node{Kind::kAtom, component, comparator, level, 0, 0});
  return e;
}

BoolExpr BoolExpr::negate(BoolExpr operand) {
  BoolExpr e = std::move(operand);
  const std::size_t child = e.root();
  e.nodes_.push_back(Node{Kind::kNot, 0, Comparator::kEq, 0, child, child});
  return e;
}

BoolExpr BoolExpr::conj(BoolExpr lhs, BoolExpr rhs) { return binary(Kind::kAnd, std::move(lhs), std::move(rhs)); }
BoolExpr BoolExpr::disj(BoolExpr lhs, BoolExpr rhs) { return binary(Kind::kOr, std::move(lhs), std::move(rhs)); }

BoolExpr BoolExpr::binary(Kind kind, BoolExpr lhs, BoolExpr rhs) {
  BoolExpr e = std::move(lhs);
  const std::size_t left_root = e.root();
  const std::size_t offset = e.nodes_.size();
  for (Node n : rhs.nodes_) {
    if (n.kind != Kind::kAtom) {
      n.lhs += offset;
      n.rhs += offset;
    }
    e.nodes_.push_back(n);
  }
  const std::size_t right_root = e.nodes_.size() - 1;
  e.nodes_.push_back(Node{kind, 0, Comparator::kEq, 0, left_root, right_root});
  return e;
}

bool BoolExpr::eval(std::span<const Level> state) const { return eval_node(root(), state); }

bool BoolExpr::eval_node(std::size_t index, std::span<const Level> state) const {
  const Node& n = nodes_[index];
  switch (n.kind) {
    case Kind::kAtom: {
      const Level v = state[n.component];
      switch (n.comparator) {
        case Comparator::kEq: return v == n.level;
        case Comparator::kLe: return v <= n.level;
        case Comparator::kGe: return v >= n.level;
      }
      return false;
    }
    case Kind::kNot: return !eval_node(n.lhs, state);
    case Kind::kAnd: return eval_node(n.lhs, state) && eval_node(n.rhs, state);
    case Kind::kOr: return eval_node(n.lhs, state) || eval_node(n.rhs, state);
  }
  return false;
}

LogicalModel::LogicalModel(std::vector<ComponentDef> components, std::vector<bool> input_flags)
    : components_(std::move(components)), input_flags_(std::move(input_flags)) {
  if (components_.empty()) throw ModelError("model declares no components");
  if (input_flags_.size() != components_.size()) throw ModelError("input flag count does not match component count");

  std::unordered_set<std::string> names;
  for (const auto& c : components_) {
    if (c.name.empty()) throw ModelError("component with empty name");
    if (!names.insert(c.name).second) throw ModelError("duplicate component '" + c.name + "'");
    if (c.max_level < 1) throw ModelError("component '" + c.name + "' must have max level >= 1");
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (input_flags_[i] && !c.rules.empty()) throw ModelError("input component '" + c.name + "' cannot have rules");
    for (const auto& rule : c.rules) {
      if (rule.target > c.max_level) throw ModelError("level out of range for '" + c.name + "'");
      if (rule.condition.empty()) throw ModelError("empty rule condition for '" + c.name + "'");
      for (const auto& n : rule.condition.nodes()) {
        if (n.kind != BoolExpr::Kind::kAtom) continue;
        if (n.component >= components_.size()) throw ModelError("rule of '" + c.name + "' references an unknown component");
        if (n.level > components_[n.component].max_level)
          throw ModelError("level out of range for '" + components_[n.component].name + "'");
      }
    }
  }

  strides_.reserve(components_.size());
  constexpr auto kMax = std::numeric_limits<StateCode::Rep>::max();
  for (const auto& c : components_) {
    strides_.push_back(state_count_);
    const StateCode::Rep radix = static_cast<StateCode::Rep>(c.max_level) + 1;
    if (state_count_ > kMax / radix / 2) throw CapacityError("state space does not fit a 127-bit state code");
    state_count_ *= radix;
  }
}

std::optional<std::size_t> LogicalModel::find(const std::string& name) const {
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (components_[i].name == name) return i;
  return std::nullopt;
}

StateCode LogicalModel::encode(std::span<const Level> state) const {
  StateCode::Rep code = 0;
  for (std::size_t i = 0; i < components_.size(); ++i) code += strides_[i] * state[i];
  return StateCode(code);
}

State LogicalModel::decode(StateCode code) const {
  State s;
  decode_into(code, s);
  return s;
}

void LogicalModel::decode_into(StateCode code, State& out) const {
  if (code.value() >= state_count_) throw std::out_of_range("state code " + code.to_string() + " out of range");
  out.resize(components_.size());
  StateCode::Rep v = code.value();
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const StateCode::Rep radix = static_cast<StateCode::Rep>(components_[i].max_level) + 1;
    out[i] = static_cast<Level>(v % radix);
    v /= radix;
  }
}

bool LogicalModel::is_valid(std::span<const Level> state) const {
  if (state.size() != components_.size()) return false;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state[i] > components_[i].max_level) return false;
  return true;
}

Level LogicalModel::eval_target(std::size_t i, std::span<const Level> state) const {
  if (input_flags_[i]) return state[i];
  for (const auto& rule : components_[i].rules)
    if (rule.condition.eval(state)) return rule.target;
  return 0;
}

std::vector<State> LogicalModel::successors(std::span<const Level> state) const {
  std::vector<State> out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Level target = eval_target(i, state);
    if (target == state[i]) continue;
    State w(state.begin(), state.end());
    w[i] = target > state[i] ? static_cast<Level>(state[i] + 1) : static_cast<Level>(state[i] - 1);
    out.push_back(std::move(w));
  }
  return out;
}

void LogicalModel::successor_codes(StateCode code, std::vector<StateCode>& out, State& scratch) const {
  out.clear();
  decode_into(code, scratch);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Level target = eval_target(i, scratch);
    if (target == scratch[i]) continue;
    out.emplace_back(target > scratch[i] ? code.value() + strides_[i] : code.value() - strides_[i]);
  }
}

std::vector<StateCode> LogicalModel::successor_codes(StateCode code) const {
  std::vector<StateCode> out;
  State scratch;
  successor_codes(code, out, scratch);
  return out;
}

double LogicalModel::transition_probability(std::span<const Level> v, std::span<const Level> w) const {
  const auto succ = successors(v);
  const bool found = std::any_of(succ.begin(), succ.end(),
                                 [&](const State& s) { return std::equal(s.begin(), s.end(), w.begin(), w.end()); });
  if (!found) throw std::invalid_argument("target state is not a successor of the source state");
  return 1.0 / static_cast<double>(succ.size());
}

std::string LogicalModel::format_state(std::span<const Level> state) const {
  std::string out;
  for (const Level l : state) {
    if (l <= 9) {
      out.push_back(static_cast<char>('0' + l));
    } else {
      out += "[" + std::to_string(l) + "]";
    }
  }
  return out;
}

std::string LogicalModel::format_state(StateCode code) const { return format_state(decode(code)); }

}  // namespace attrq
