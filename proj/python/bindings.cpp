#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "attrq/avatar.hpp"
#include "attrq/errors.hpp"
#include "attrq/firefront.hpp"
#include "attrq/genrand.hpp"
#include "attrq/markov.hpp"
#include "attrq/parser.hpp"

namespace py = pybind11;

namespace {

std::string report(const attrq::AbsorptionResult& r, const attrq::ModelDocument& doc) {
  return attrq::serialize_result(r, attrq::ResultFormat::kJson, &doc.model);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Attractor reachability probabilities of logical models (native core)";

  py::register_exception<attrq::ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<attrq::CapacityError>(m, "CapacityError", PyExc_RuntimeError);
  py::register_exception<attrq::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<attrq::ModelDocument>(m, "Model")
      .def_readonly("name", &attrq::ModelDocument::name)
      .def_property_readonly("components",
                             [](const attrq::ModelDocument& d) {
                               py::list out;
                               for (const auto& c : d.model.components()) out.append(c.name);
                               return out;
                             })
      .def_property_readonly("state_count",
                             [](const attrq::ModelDocument& d) {
                               return py::int_(py::str(attrq::StateCode(d.model.state_count()).to_string()));
                             })
      .def("text", [](const attrq::ModelDocument& d) { return attrq::print_model(d); })
      .def("__eq__", [](const attrq::ModelDocument& a, const attrq::ModelDocument& b) { return a == b; });

  m.def("parse_model", &attrq::parse_model, py::arg("text"), py::arg("name") = "model");
  m.def("load_model", [](const std::string& path) { return attrq::load_model(path); }, py::arg("path"));

  m.def(
      "exact_json",
      [](const attrq::ModelDocument& d, std::size_t cap) {
        attrq::AbsorptionResult r;
        {
          py::gil_scoped_release release;
          r = attrq::analyze_exact(d, cap);
        }
        return report(r, d);
      },
      py::arg("model"), py::arg("state_cap") = attrq::kDefaultStateCap);

  m.def(
      "firefront_json",
      [](const attrq::ModelDocument& d, double alpha, double beta, std::optional<std::int64_t> max_iterations) {
        attrq::FirefrontConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.max_iterations = max_iterations;
        attrq::AbsorptionResult r;
        {
          py::gil_scoped_release release;
          r = attrq::firefront_run(d, cfg).result;
        }
        return report(r, d);
      },
      py::arg("model"), py::arg("alpha") = 1e-5, py::arg("beta") = 1e-3, py::arg("max_iterations") = py::none());

  m.def(
      "avatar_json",
      [](const attrq::ModelDocument& d, std::int64_t runs, std::uint64_t seed, unsigned threads, std::size_t tau,
         std::size_t min_rewire) {
        attrq::AvatarConfig cfg;
        cfg.runs = runs;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.tau0 = tau;
        cfg.min_cycle_to_rewire = min_rewire;
        attrq::AbsorptionResult r;
        {
          py::gil_scoped_release release;
          r = attrq::avatar_run(d, cfg).result;
        }
        return report(r, d);
      },
      py::arg("model"), py::arg("runs") = 10000, py::arg("seed") = 0, py::arg("threads") = 1, py::arg("tau") = 3,
      py::arg("min_rewire") = 4);

  m.def(
      "generate_model",
      [](std::size_t n, std::size_t k, std::uint64_t seed) {
        attrq::RandomStream rng(seed);
        return attrq::ModelDocument{"random", attrq::generate_random_model(n, k, rng), {}, {}};
      },
      py::arg("n"), py::arg("k"), py::arg("seed") = 0);

  m.def(
      "is_multistable", [](const attrq::ModelDocument& d) { return attrq::filter_multistable(d.model); },
      py::arg("model"));
}
