#include <doctest.h>

#include <stdexcept>

#include "attrq/firefront.hpp"
#include "attrq/genrand.hpp"
#include "attrq/markov.hpp"
#include "support.hpp"

using namespace attrq;
using attrq::testing::code;

TEST_CASE("toggle in one step") {
  const auto doc = attrq::testing::toggle_doc();
  FirefrontConfig cfg;
  const auto st = firefront_step(doc.model, doc.oracles, FirefrontState::start(code(0), 0), cfg);
  CHECK(st.firefront.empty());
  CHECK(st.point_attractors.at(code(1)) == doctest::Approx(0.5));
  CHECK(st.point_attractors.at(code(2)) == doctest::Approx(0.5));

  cfg.trace = true;
  const auto out = firefront_run(doc, cfg);
  CHECK(out.result.iterations == 1);
  CHECK(*out.result.residual_probability == 0.0);
  REQUIRE(out.result.attractors.size() == 2);
  for (const auto& e : out.result.attractors) {
    CHECK(*e.lower_bound == doctest::Approx(0.5));
    CHECK(*e.upper_bound == doctest::Approx(0.5));
  }
  REQUIRE(out.trace.size() == 2);
  CHECK(out.trace.back().attractor_mass == doctest::Approx(1.0));
  CHECK(emit_trace(out.trace).rfind("iteration,F_size,N_size,A_size,P_F,P_N,P_A\n", 0) == 0);
}

TEST_CASE("small shares are neglected") {
  // a counts up to 3 and b toggles freely: from (0,0) both move.
  const auto doc = parse_model("NODE a 3\nNODE b 1\nTARGET a 3 : a>=0\nTARGET b 1 : b=0\n");
  FirefrontConfig cfg;
  auto st = FirefrontState::start(code(0), 0);
  st.firefront[code(0)] = 1.6e-5;
  const auto next = firefront_step(doc.model, doc.oracles, st, cfg);
  CHECK(next.firefront.empty());
  REQUIRE(next.neglected.size() == 2);
  for (const auto& [s, p] : next.neglected) CHECK(p == doctest::Approx(8e-6));

  SUBCASE("neglected mass is revived once it reaches alpha") {
    FirefrontState again = next;
    again.firefront[code(0)] = 1.6e-5;
    const auto revived = firefront_step(doc.model, doc.oracles, again, cfg);
    CHECK(revived.neglected.empty());
    CHECK(revived.firefront.size() == 2);
    for (const auto& [s, p] : revived.firefront) CHECK(p == doctest::Approx(1.6e-5));
  }
}

TEST_CASE("oracle states are absorbing keys") {
  const auto doc =
      parse_model("NODE a 1\nNODE b 1\nTARGET a 1 : b=0\nTARGET b 1 : a=0\nORACLE cc : a=* b=1\n");
  const auto out = firefront_run(doc, FirefrontConfig{});
  REQUIRE(out.result.attractors.size() == 2);
  bool saw_oracle = false;
  for (const auto& e : out.result.attractors) {
    CHECK(e.probability == doctest::Approx(0.5));
    if (e.attractor.oracle == "cc") {
      saw_oracle = true;
      CHECK(e.attractor.size == 2);
    }
  }
  CHECK(saw_oracle);
}

TEST_CASE("complex attractors stay in the residual") {
  auto doc = attrq::testing::repressilator_doc();
  FirefrontConfig cfg;
  cfg.max_iterations = 200;
  cfg.trace = true;
  const auto out = firefront_run(doc, cfg);
  CHECK(out.result.attractors.empty());
  CHECK(out.result.iteration_cap_reached);
  CHECK(*out.result.residual_probability == doctest::Approx(1.0));
  for (const auto& row : out.trace)
    CHECK(std::abs(row.firefront_mass + row.neglected_mass + row.attractor_mass - 1.0) <= 1e-9);

  SUBCASE("an oracle for the cycle captures all mass") {
    doc = parse_model(print_model(doc) + "ORACLE ring : a=1 b=0\n");
    const auto hit = firefront_run(doc, FirefrontConfig{});
    REQUIRE(hit.result.attractors.size() == 1);
    CHECK(hit.result.attractors[0].probability == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("bounds enclose the exact value on random models") {
  RandomStream rng(77);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    ModelDocument doc{"r", generate_random_model(7, 2, rng), {}, {}};
    const auto exact = analyze_exact(doc);
    if (std::any_of(exact.attractors.begin(), exact.attractors.end(),
                    [](const AttractorEstimate& e) { return e.attractor.kind != AttractorKind::kPoint; }))
      continue;
    FirefrontConfig cfg;
    cfg.trace = true;
    const auto ff = firefront_run(doc, cfg);
    for (const auto& row : ff.trace)
      CHECK(std::abs(row.firefront_mass + row.neglected_mass + row.attractor_mass - 1.0) <= 1e-9);
    for (std::size_t i = 1; i < ff.trace.size(); ++i)
      CHECK(ff.trace[i].attractor_mass >= ff.trace[i - 1].attractor_mass - 1e-12);
    for (const auto& e : exact.attractors) {
      double lower = 0.0;
      double upper = *ff.result.residual_probability;
      for (const auto& f : ff.result.attractors)
        if (f.attractor.members == e.attractor.members) {
          lower = *f.lower_bound;
          upper = *f.upper_bound;
        }
      CHECK(lower <= e.probability + 1e-9);
      CHECK(e.probability <= upper + 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("invalid configurations") {
  const auto doc = attrq::testing::toggle_doc();
  FirefrontConfig bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(firefront_run(doc, bad), std::invalid_argument);
  const auto sampled = parse_model("NODE a 1\nINIT * SAMPLE\n");
  CHECK_THROWS_AS(firefront_run(sampled, FirefrontConfig{}), std::invalid_argument);
}
