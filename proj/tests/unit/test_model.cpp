#include <doctest.h>

#include <stdexcept>

#include "attrq/errors.hpp"
#include "attrq/model.hpp"
#include "support.hpp"

using namespace attrq;
using attrq::testing::code;

namespace {

LogicalModel single(Level max_level, std::vector<TargetRule> rules) {
  return LogicalModel({ComponentDef{"a", max_level, std::move(rules)}}, {false});
}

}  // namespace

TEST_CASE("targets follow first-match rules with default 0") {
  const auto doc = attrq::testing::toggle_doc();
  const State v00{0, 0};
  const State v11{1, 1};
  CHECK(doc.model.eval_target(0, v00) == 1);
  CHECK(doc.model.eval_target(0, v11) == 0);

  // a in {0,1,2}, b Boolean; a's only rule targets 2 when b >= 1.
  const LogicalModel m({ComponentDef{"a", 2, {TargetRule{2, BoolExpr::atom(1, Comparator::kGe, 1)}}},
                        ComponentDef{"b", 1, {}}},
                       {false, false});
  CHECK(m.eval_target(0, State{0, 1}) == 2);
  CHECK(m.eval_target(0, State{1, 0}) == 0);
}

TEST_CASE("first matching rule wins") {
  const LogicalModel m({ComponentDef{"a", 2,
                                     {TargetRule{2, BoolExpr::atom(1, Comparator::kGe, 1)},
                                      TargetRule{1, BoolExpr::atom(1, Comparator::kEq, 1)}}},
                        ComponentDef{"b", 1, {}}},
                       {false, false});
  CHECK(m.eval_target(0, State{1, 1}) == 2);
}

TEST_CASE("inputs keep their level") {
  const LogicalModel m({ComponentDef{"i", 1, {}}, ComponentDef{"x", 1, {TargetRule{1, BoolExpr::atom(0, Comparator::kEq, 1)}}}},
                       {true, false});
  CHECK(m.eval_target(0, State{1, 0}) == 1);
  CHECK(m.eval_target(0, State{0, 0}) == 0);
  CHECK(m.successors(State{1, 1}).empty());
}

TEST_CASE("asynchronous successors") {
  const auto doc = attrq::testing::toggle_doc();
  const auto succ = doc.model.successors(State{0, 0});
  REQUIRE(succ.size() == 2);
  CHECK(succ[0] == State{1, 0});
  CHECK(succ[1] == State{0, 1});
  CHECK(doc.model.successors(State{1, 0}).empty());

  SUBCASE("unit steps toward a distant target") {
    const LogicalModel m = single(2, {TargetRule{2, BoolExpr::negate(BoolExpr::atom(0, Comparator::kEq, 2))}});
    const auto s = m.successors(State{0});
    REQUIRE(s.size() == 1);
    CHECK(s[0] == State{1});
    const auto down = LogicalModel({ComponentDef{"a", 2, {}}}, {false}).successors(State{2});
    REQUIRE(down.size() == 1);
    CHECK(down[0] == State{1});
  }

  SUBCASE("code-based successors agree") {
    const auto rep = attrq::testing::repressilator_doc();
    for (std::uint64_t s = 0; s < 8; ++s) {
      std::vector<StateCode> expected;
      for (const auto& w : rep.model.successors(rep.model.decode(code(s)))) expected.push_back(rep.model.encode(w));
      CHECK(rep.model.successor_codes(code(s)) == expected);
    }
  }
}

TEST_CASE("transition probabilities are uniform over successors") {
  const auto toggle = attrq::testing::toggle_doc();
  CHECK(toggle.model.transition_probability(State{0, 0}, State{1, 0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(toggle.model.transition_probability(State{1, 0}, State{1, 0}), std::invalid_argument);

  const auto rep = attrq::testing::repressilator_doc();
  CHECK(rep.model.transition_probability(State{0, 0, 0}, State{1, 0, 0}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("mixed-radix state codes") {
  const auto toggle = attrq::testing::toggle_doc();
  CHECK(toggle.model.encode(State{0, 0}) == code(0));
  CHECK(toggle.model.encode(State{1, 0}) == code(1));

  const LogicalModel m({ComponentDef{"a", 1, {}}, ComponentDef{"b", 2, {}}}, {false, false});
  CHECK(m.encode(State{1, 2}) == code(5));
  CHECK(m.state_count() == 6);
  for (std::uint64_t c = 0; c < 6; ++c) CHECK(m.encode(m.decode(code(c))) == code(c));
  CHECK_THROWS_AS(m.decode(code(6)), std::out_of_range);
  CHECK(m.format_state(code(5)) == "12");
}

TEST_CASE("codes beyond 64 bits round-trip") {
  std::vector<ComponentDef> comps;
  for (int i = 0; i < 100; ++i) comps.push_back(ComponentDef{"x" + std::to_string(i), 1, {}});
  const LogicalModel m(std::move(comps), std::vector<bool>(100, false));
  State s(100, 0);
  s[99] = 1;
  s[3] = 1;
  const StateCode c = m.encode(s);
  CHECK(c.value() == ((StateCode::Rep{1} << 99) | 8));
  CHECK(m.decode(c) == s);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(LogicalModel({}, {}), ModelError);
  CHECK_THROWS_AS(LogicalModel({ComponentDef{"a", 1, {}}, ComponentDef{"a", 1, {}}}, {false, false}), ModelError);
  CHECK_THROWS_AS(single(0, {}), ModelError);
  CHECK_THROWS_AS(single(1, {TargetRule{5, BoolExpr::atom(0, Comparator::kEq, 0)}}), ModelError);
  CHECK_THROWS_AS(single(1, {TargetRule{1, BoolExpr::atom(3, Comparator::kEq, 0)}}), ModelError);
  CHECK_THROWS_AS(LogicalModel({ComponentDef{"a", 1, {TargetRule{1, BoolExpr::atom(0, Comparator::kEq, 0)}}}}, {true}),
                  ModelError);

  std::vector<ComponentDef> huge;
  for (int i = 0; i < 128; ++i) huge.push_back(ComponentDef{"x" + std::to_string(i), 1, {}});
  CHECK_THROWS_AS(LogicalModel(std::move(huge), std::vector<bool>(128, false)), CapacityError);
}
