#include <doctest.h>

#include <stdexcept>

#include "attrq/genrand.hpp"
#include "attrq/markov.hpp"
#include "support.hpp"

using namespace attrq;
using attrq::testing::code;

namespace {

AbsorbingChain chain_of(const ExplicitSTG& stg) { return build_chain(stg, tarjan_scc(stg)); }

SparseDistribution point(StateCode s) { return SparseDistribution{{s, 1.0}}; }

double probability_of(const AbsorptionResult& r, StateCode member) {
  for (const auto& e : r.attractors)
    if (std::binary_search(e.attractor.members.begin(), e.attractor.members.end(), member)) return e.probability;
  return 0.0;
}

}  // namespace

TEST_CASE("toggle chain blocks") {
  const auto doc = attrq::testing::toggle_doc();
  const auto chain = chain_of(build_stg(doc.model, std::optional<State>{}));
  CHECK(chain.transient == std::vector<StateCode>{code(0), code(3)});
  CHECK(chain.classes.size() == 2);
  CHECK(chain.q.nonZeros() == 0);
  for (int r = 0; r < 2; ++r) {
    CHECK(chain.p.coeff(r, 0) == doctest::Approx(0.5));
    CHECK(chain.p.coeff(r, 1) == doctest::Approx(0.5));
  }

  const auto res = absorption_probabilities(chain, point(code(0)));
  REQUIRE(res.attractors.size() == 2);
  CHECK(res.attractors[0].probability == doctest::Approx(0.5));
  CHECK(res.attractors[1].probability == doctest::Approx(0.5));
  CHECK(res.attractors[0].avg_depth == doctest::Approx(1.0));
}

TEST_CASE("repressilator chain") {
  const auto doc = attrq::testing::repressilator_doc();
  const auto chain = chain_of(build_stg(doc.model, std::optional<State>{}));
  CHECK(chain.transient.size() == 2);
  REQUIRE(chain.classes.size() == 1);
  for (Eigen::Index r = 0; r < chain.p.rows(); ++r) CHECK(chain.p.row(r).sum() == doctest::Approx(1.0));
  const auto res = absorption_probabilities(chain, point(code(0)));
  REQUIRE(res.attractors.size() == 1);
  CHECK(res.attractors[0].probability == doctest::Approx(1.0));
}

TEST_CASE("no transient states") {
  const auto doc = parse_model("NODE a 1\n");
  const auto chain = chain_of(build_stg(doc.model, std::optional<State>{State{0}}));
  CHECK(chain.transient.empty());
  const auto res = absorption_probabilities(chain, point(code(0)));
  REQUIRE(res.attractors.size() == 1);
  CHECK(res.attractors[0].probability == 1.0);
  CHECK(res.attractors[0].avg_depth == 0.0);
}

TEST_CASE("closed form on the four-cycle with exits") {
  const auto rows = attrq::testing::four_cycle_rows();
  const auto chain = chain_of(attrq::testing::stg_from(rows));
  const auto res = absorption_probabilities(chain, point(code(1)));
  CHECK(probability_of(res, code(5)) == doctest::Approx(8.0 / 15.0).epsilon(1e-12));
  CHECK(probability_of(res, code(7)) == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
  CHECK(probability_of(res, code(8)) == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
  CHECK(probability_of(res, code(6)) == doctest::Approx(1.0 / 15.0).epsilon(1e-12));

  const auto power = power_absorption_estimate(chain, point(code(1)), 40);
  for (int v = 5; v <= 8; ++v)
    CHECK(std::abs(probability_of(power, code(v)) - probability_of(res, code(v))) < 1e-9);
}

TEST_CASE("power estimate edge cases") {
  const auto toggle = attrq::testing::toggle_doc();
  const auto chain = chain_of(build_stg(toggle.model, std::optional<State>{}));
  const auto one = power_absorption_estimate(chain, point(code(0)), 1);
  CHECK(one.residual_probability == doctest::Approx(0.0));
  REQUIRE(one.attractors.size() == 2);
  CHECK(one.attractors[0].probability == doctest::Approx(0.5));

  const auto zero = power_absorption_estimate(chain, point(code(0)), 0);
  CHECK(zero.residual_probability == doctest::Approx(1.0));
  CHECK(zero.total_probability() == doctest::Approx(0.0));
}

TEST_CASE("exact solver against value iteration on random models") {
  RandomStream rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const auto model = generate_random_model(6, 2, rng);
    const auto rows = attrq::testing::model_rows(model);
    const auto expected_sets = attrq::testing::brute_force_attractors(rows);
    const auto chain = chain_of(build_stg(model, std::optional<State>{}));
    const StateCode start = code(rng.below(64));
    const auto res = absorption_probabilities(chain, point(start));
    const auto oracle = attrq::testing::value_iteration(rows, expected_sets, static_cast<std::uint64_t>(start.value()));
    for (std::size_t a = 0; a < expected_sets.size(); ++a)
      CHECK(std::abs(probability_of(res, code(*expected_sets[a].begin())) - oracle[a]) < 1e-9);
    CHECK(res.total_probability() == doctest::Approx(1.0));

    const std::size_t k = absorption_horizon(chain);
    const auto power = power_absorption_estimate(chain, point(start), k);
    for (const auto& e : res.attractors)
      CHECK(std::abs(probability_of(power, e.attractor.members.front()) - e.probability) < 1e-9);
  }
}

TEST_CASE("conditional depth on a chain of known length") {
  // 0 -> 1 -> 2, 0 -> 3: P(2) = 1/2 reached in 2 steps, P(3) = 1/2 in 1 step.
  const attrq::testing::Rows rows{{0, {{1, 0.5}, {3, 0.5}}}, {1, {{2, 1.0}}}, {2, {}}, {3, {}}};
  const auto res = absorption_probabilities(chain_of(attrq::testing::stg_from(rows)), point(code(0)));
  for (const auto& e : res.attractors) {
    if (e.attractor.members.front() == code(2)) CHECK(*e.avg_depth == doctest::Approx(2.0));
    if (e.attractor.members.front() == code(3)) CHECK(*e.avg_depth == doctest::Approx(1.0));
  }
}

TEST_CASE("initial mass outside the chain is rejected") {
  const auto toggle = attrq::testing::toggle_doc();
  const auto chain = chain_of(build_stg(toggle.model, std::optional<State>{State{0, 0}}));
  CHECK_THROWS_AS(absorption_probabilities(chain, point(code(3))), std::invalid_argument);
}

TEST_CASE("exact analysis of documents") {
  const auto toggle = attrq::testing::toggle_doc();
  const auto res = analyze_exact(toggle);
  CHECK(res.method == "exact");
  REQUIRE(res.attractors.size() == 2);
  CHECK(res.attractors[0].probability == doctest::Approx(0.5));

  const auto sampled = parse_model("NODE a 1\nNODE b 1\nTARGET a 1 : b=0\nTARGET b 1 : a=0\nINIT * SAMPLE\n");
  const auto both = analyze_exact(sampled);
  REQUIRE(both.attractors.size() == 2);
  CHECK(both.attractors[0].probability == doctest::Approx(0.5));
}
