#include "attrq/result.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace attrq {

Attractor Attractor::from_members(std::vector<StateCode> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  Attractor a;
  a.kind = members.size() == 1 ? AttractorKind::kPoint : AttractorKind::kComplex;
  a.size = members.size();
  a.members = std::move(members);
  return a;
}

Attractor Attractor::from_oracle(std::string id, std::uint64_t size) {
  Attractor a;
  a.kind = AttractorKind::kComplex;
  a.oracle = std::move(id);
  a.size = size;
  return a;
}

void AbsorptionResult::sort_attractors() {
  std::stable_sort(attractors.begin(), attractors.end(), [](const AttractorEstimate& a, const AttractorEstimate& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    const auto& am = a.attractor.members;
    const auto& bm = b.attractor.members;
    if (am.empty() != bm.empty()) return !am.empty();
    if (!am.empty() && am.front() != bm.front()) return am.front() < bm.front();
    return a.attractor.oracle < b.attractor.oracle;
  });
}

double AbsorptionResult::total_probability() const {
  return std::accumulate(attractors.begin(), attractors.end(), 0.0,
                         [](double acc, const AttractorEstimate& e) { return acc + e.probability; });
}

std::string attractor_id(const AttractorEstimate& estimate, std::size_t index) {
  return (estimate.attractor.kind == AttractorKind::kPoint ? "PA" : "CA") + std::to_string(index + 1);
}

namespace {

using Json = nlohmann::ordered_json;

std::string number(double v) {
  // Shortest text that reads back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string representative(const Attractor& a, const LogicalModel* model) {
  if (a.members.empty()) return {};
  return model ? model->format_state(a.members.front()) : a.members.front().to_string();
}

Json to_json(const AbsorptionResult& r, const LogicalModel* model) {
  Json j;
  j["model"] = r.model;
  j["method"] = r.method;
  Json params = Json::object();
  for (const auto& [key, value] : r.parameters) std::visit([&, &k = key](const auto& v) { params[k] = v; }, value);
  j["parameters"] = std::move(params);

  Json list = Json::array();
  for (std::size_t i = 0; i < r.attractors.size(); ++i) {
    const auto& e = r.attractors[i];
    Json a;
    a["id"] = attractor_id(e, i);
    a["kind"] = e.attractor.kind == AttractorKind::kPoint ? "point" : "complex";
    a["size"] = e.attractor.size;
    a["probability"] = e.probability;
    if (e.lower_bound) a["lower_bound"] = *e.lower_bound;
    if (e.upper_bound) a["upper_bound"] = *e.upper_bound;
    if (e.std_error) a["std_error"] = *e.std_error;
    if (e.avg_depth) a["avg_depth"] = *e.avg_depth;
    if (!e.attractor.oracle.empty()) a["oracle"] = e.attractor.oracle;
    if (!e.attractor.members.empty()) a["state"] = representative(e.attractor, model);
    if (!e.inputs.empty()) {
      Json inputs = Json::array();
      for (const auto& b : e.inputs) {
        Json val = Json::object();
        for (const auto& [name, level] : b.valuation) val[name] = level;
        inputs.push_back(Json{{"valuation", std::move(val)}, {"probability", b.probability}, {"hits", b.hits}});
      }
      a["inputs"] = std::move(inputs);
    }
    list.push_back(std::move(a));
  }
  j["attractors"] = std::move(list);
  if (r.residual_probability) j["residual_probability"] = *r.residual_probability;
  if (r.iterations) {
    j["iterations"] = *r.iterations;
    j["iteration_cap_reached"] = r.iteration_cap_reached;
  }
  if (r.runs) j["runs"] = *r.runs;
  if (r.aborted_runs) j["aborted_runs"] = *r.aborted_runs;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

std::string to_csv(const AbsorptionResult& r, const LogicalModel* model) {
  std::ostringstream out;
  out << "id,kind,size,probability,lower_bound,upper_bound,std_error,avg_depth,state\n";
  auto opt = [](const std::optional<double>& v) { return v ? number(*v) : std::string(); };
  for (std::size_t i = 0; i < r.attractors.size(); ++i) {
    const auto& e = r.attractors[i];
    out << attractor_id(e, i) << ',' << (e.attractor.kind == AttractorKind::kPoint ? "point" : "complex") << ','
        << e.attractor.size << ',' << number(e.probability) << ',' << opt(e.lower_bound) << ',' << opt(e.upper_bound)
        << ',' << opt(e.std_error) << ',' << opt(e.avg_depth) << ','
        << (e.attractor.oracle.empty() ? representative(e.attractor, model) : e.attractor.oracle) << '\n';
  }
  return out.str();
}

}  // namespace

std::string serialize_result(const AbsorptionResult& result, ResultFormat format, const LogicalModel* model) {
  if (format == ResultFormat::kCsv) return to_csv(result, model);
  return to_json(result, model).dump(2) + "\n";
}

}  // namespace attrq
