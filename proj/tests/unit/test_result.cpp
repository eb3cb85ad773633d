#include <doctest.h>

#include <nlohmann/json.hpp>

#include "attrq/markov.hpp"
#include "attrq/result.hpp"
#include "support.hpp"

using namespace attrq;
using attrq::testing::code;

TEST_CASE("toggle report") {
  const auto doc = attrq::testing::toggle_doc();
  const auto res = analyze_exact(doc);
  const auto j = nlohmann::json::parse(serialize_result(res, ResultFormat::kJson, &doc.model));
  CHECK(j["method"] == "exact");
  REQUIRE(j["attractors"].size() == 2);
  CHECK(j["attractors"][0]["id"] == "PA1");
  CHECK(j["attractors"][0]["probability"] == 0.5);
  CHECK(j["attractors"][1]["probability"] == 0.5);
  CHECK(j["attractors"][0]["state"] == "10");

  const std::string csv = serialize_result(res, ResultFormat::kCsv, &doc.model);
  CHECK(csv.rfind("id,kind,size,probability,lower_bound,upper_bound,std_error,avg_depth,state\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("optional fields") {
  AbsorptionResult r;
  r.model = "m";
  r.method = "firefront";
  r.residual_probability = 0.25;
  r.iterations = 3;
  AttractorEstimate e;
  e.attractor = Attractor::point(code(2));
  e.probability = 0.75;
  e.lower_bound = 0.75;
  e.upper_bound = 1.0;
  InputBreakdown b;
  b.valuation = {{"i", 1}};
  b.probability = 0.75;
  b.hits = 3;
  e.inputs.push_back(b);
  r.attractors.push_back(e);
  const auto j = nlohmann::json::parse(serialize_result(r, ResultFormat::kJson));
  CHECK(j["residual_probability"] == 0.25);
  CHECK(j["iterations"] == 3);
  CHECK(j["attractors"][0]["upper_bound"] == 1.0);
  CHECK_FALSE(j["attractors"][0].contains("std_error"));
  CHECK(j["attractors"][0]["inputs"][0]["probability"] == 0.75);
  CHECK_FALSE(j.contains("runs"));
}

TEST_CASE("attractor ordering and ids") {
  AbsorptionResult r;
  for (auto [s, p] : {std::pair{5, 0.2}, std::pair{1, 0.4}, std::pair{3, 0.4}}) {
    AttractorEstimate e;
    e.attractor = Attractor::point(code(s));
    e.probability = p;
    r.attractors.push_back(e);
  }
  AttractorEstimate cycle;
  cycle.attractor = Attractor::from_members({code(9), code(8)});
  cycle.probability = 0.2;
  r.attractors.push_back(cycle);
  r.sort_attractors();
  CHECK(r.attractors[0].attractor.members.front() == code(1));
  CHECK(r.attractors[1].attractor.members.front() == code(3));
  CHECK(r.attractors[2].attractor.members.front() == code(5));
  CHECK(r.attractors[3].attractor.members == std::vector<StateCode>{code(8), code(9)});
  CHECK(attractor_id(r.attractors[3], 3) == "CA4");
  CHECK(r.total_probability() == doctest::Approx(1.2));
}
