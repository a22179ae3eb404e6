// Python bindings. Configs cross the boundary as JSON text; the msint package
// wraps them so callers pass plain dicts.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "msint/verify.hpp"

namespace py = pybind11;
using namespace msint;

namespace {

Interval make_interval(Time lo, Time hi, const std::string& shape) {
  if (shape == "(]") return Interval::left_open(lo, hi);
  if (shape == "[)") return Interval::right_open(lo, hi);
  if (shape == "[]") return Interval::closed(lo, hi);
  if (shape == "()") return Interval::open(lo, hi);
  throw std::invalid_argument("interval shape must be one of (] [) [] (), got " + shape);
}

std::vector<EventHistory> parse_events(const std::string& csv, int d) {
  std::istringstream in(csv);
  return read_event_csv(in, d);
}

py::dict record_dict(const CheckRecord& r) {
  py::dict out;
  out["name"] = r.name;
  out["anchor"] = r.anchor;
  out["lhs"] = r.lhs;
  out["rhs"] = r.rhs;
  out["tol"] = r.tol;
  out["pass"] = r.pass;
  return out;
}

Tolerances tolerances(const std::map<std::string, double>& overrides) {
  Tolerances tol;
  for (const auto& [k, v] : overrides) tol.set(k, v);
  return tol;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Interval functions, path-space oracles and multistate estimators";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CsvError>(m, "CsvError", PyExc_ValueError);
  py::register_exception<PathSpaceTooLarge>(m, "PathSpaceTooLarge", PyExc_ValueError);

  py::class_<PathSpace>(m, "PathSpace")
      .def_property_readonly("d", &PathSpace::d)
      .def_property_readonly("tau", &PathSpace::tau)
      .def_property_readonly("grid", &PathSpace::grid)
      .def("to_json", [](const PathSpace& ps) { return to_json(ps).dump(); })
      .def(
          "occupation",
          [](const PathSpace& ps, Time t, bool left) {
            return occupation_vector(ps, t, left ? Side::kLeft : Side::kRight);
          },
          py::arg("t"), py::arg("left") = false)
      .def(
          "transition",
          [](const PathSpace& ps, Time lo, Time hi, const std::string& shape) {
            return transition_matrix(ps, make_interval(lo, hi, shape));
          },
          py::arg("lo"), py::arg("hi"), py::arg("shape") = "(]")
      .def(
          "hazard",
          [](const PathSpace& ps, Time lo, Time hi, const std::string& shape) {
            return hazard(ps).lambda()(make_interval(lo, hi, shape));
          },
          py::arg("lo"), py::arg("hi"), py::arg("shape") = "(]")
      .def(
          "hazard_product",
          [](const PathSpace& ps, Time lo, Time hi, const std::string& shape) {
            return prodint_additive(hazard(ps).lambda(), make_interval(lo, hi, shape));
          },
          py::arg("lo"), py::arg("hi"), py::arg("shape") = "(]");

  m.def("pathspace_from_json", [](const std::string& text) { return pathspace_from_json(json::parse(text)); });
  m.def(
      "exact_pathspace",
      [](const std::string& scenario, std::size_t max_paths) {
        return exact_pathspace(scenario_from_json(json::parse(scenario)), max_paths);
      },
      py::arg("scenario"), py::arg("max_paths") = 1'000'000);
  m.def("idn_scenario", [] { return to_json(idn_scenario()).dump(); });
  m.def("surv_scenario", [] { return to_json(surv_scenario()).dump(); });

  m.def(
      "simulate",
      [](const std::string& scenario, const std::string& censoring, std::size_t n, std::uint64_t seed) {
        const Sample s = simulate_sample(scenario_from_json(json::parse(scenario)),
                                         censoring_from_json(json::parse(censoring)), n, seed);
        std::ostringstream out;
        write_event_csv(out, s);
        return out.str();
      },
      py::arg("scenario"), py::arg("censoring"), py::arg("n"), py::arg("seed"),
      "Simulated sample as event CSV text.");

  m.def(
      "estimate",
      [](const std::string& events_csv, int d, Time tau) {
        return to_json(estimate(parse_events(events_csv, d), d, tau)).dump();
      },
      py::arg("events_csv"), py::arg("d"), py::arg("tau"), "EstimateGrid as JSON text.");

  m.def("suite_names", &suite_names);
  m.def(
      "verify",
      [](const PathSpace& ps, const std::string& label, bool markov, const std::vector<std::string>& only,
         const std::map<std::string, double>& tol) {
        py::list out;
        for (const auto& r : run_suites(ps, label, markov, only, tolerances(tol))) out.append(record_dict(r));
        return out;
      },
      py::arg("pathspace"), py::arg("label") = "pathspace", py::arg("markov") = false,
      py::arg("only") = std::vector<std::string>{}, py::arg("tol") = std::map<std::string, double>{});

  m.def(
      "convergence",
      [](const std::string& scenario, const std::string& conforming, const std::optional<std::string>& violating,
         const std::vector<std::size_t>& ns, std::uint64_t seed, const std::map<std::string, double>& tol) {
        ConvergenceOptions opts;
        opts.ns = ns;
        opts.seed = seed;
        std::optional<CensoringConfig> v;
        if (violating) v = censoring_from_json(json::parse(*violating));
        return to_json(run_convergence(scenario_from_json(json::parse(scenario)),
                                       censoring_from_json(json::parse(conforming)), v ? &*v : nullptr, opts,
                                       tolerances(tol)))
            .dump();
      },
      py::arg("scenario"), py::arg("conforming"), py::arg("violating") = std::nullopt,
      py::arg("ns") = std::vector<std::size_t>{100, 1000, 10000}, py::arg("seed") = 7,
      py::arg("tol") = std::map<std::string, double>{}, "RunReport as JSON text.");
}
