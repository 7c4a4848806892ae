#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "misanthrope/errors.hpp"
#include "misanthrope/experiment.hpp"

namespace py = pybind11;
using namespace misanthrope;

namespace {

Profile to_profile(const std::vector<double>& v) { return Profile(v); }
std::vector<double> from_profile(const Profile& p) { return {p.values().begin(), p.values().end()}; }

py::dict flux_dict(const FluxCharacteristics& f) {
  py::dict d;
  d["v0"] = f.v0;
  d["a0"] = f.a0;
  d["b0"] = f.b0;
  d["c0"] = f.c0;
  d["c0_error"] = f.c0_error;
  d["degenerate"] = f.degenerate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "misanthrope-class particle systems: core bindings";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<HorizonError>(m, "HorizonError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<SectorError>(m, "SectorError", base.ptr());

  py::class_<RateModel>(m, "RateModel")
      .def_property_readonly("name", &RateModel::name)
      .def("rate", &RateModel::rate, py::arg("x"), py::arg("y"))
      .def_static("from_json", [](const std::string& s) { return parse_model(Json::parse(s)); });

  m.def("tasep", &catalog::tasep);
  m.def("k_exclusion", &catalog::k_exclusion, py::arg("K"), py::arg("scale") = 1.0);
  m.def("zero_range_linear", [](double slope) { return catalog::zero_range(RFunction::linear(slope)); },
        py::arg("slope") = 1.0);
  m.def("bricklayers_linear", [](double slope) { return catalog::bricklayers(RFunction::linear(slope)); },
        py::arg("slope") = 1.0);

  m.def(
      "validate",
      [](const RateModel& model, int window) {
        const auto rep = validate_conditions(model, window);
        py::dict checks;
        for (const auto& c : rep.checks) checks[py::str(c.name)] = c.passed;
        return py::make_tuple(rep.all_passed(), checks);
      },
      py::arg("model"), py::arg("window") = 64);

  py::class_<EquilibriumFamily>(m, "EquilibriumFamily")
      .def(py::init([](const RateModel& model) { return EquilibriumFamily::build(model); }))
      .def("F", &EquilibriumFamily::F)
      .def("v_of_theta", &EquilibriumFamily::v_of_theta)
      .def("theta_of_v", &EquilibriumFamily::theta_of_v)
      .def("flux_hat", &EquilibriumFamily::flux_hat)
      .def("density_range", &EquilibriumFamily::density_range)
      .def("site_entropy", &EquilibriumFamily::site_entropy)
      .def("flux_derivatives",
           [](const EquilibriumFamily& f, double v0) { return flux_dict(f.flux_derivatives(v0)); });

  m.def("shock_time", [](const std::vector<double>& u0, double c0) { return shock_time(to_profile(u0), c0); });
  m.def("solve_characteristics", [](const std::vector<double>& u0, double c0, double t, std::size_t m_out) {
    return from_profile(solve_characteristics(to_profile(u0), c0, t, m_out));
  });
  m.def(
      "solve_godunov",
      [](const std::vector<double>& u0, double c0, double t, std::size_t m_cells, double cfl) {
        return from_profile(solve_godunov(to_profile(u0), c0, t, m_cells, cfl));
      },
      py::arg("u0"), py::arg("c0"), py::arg("t"), py::arg("m"), py::arg("cfl") = 0.5);

  m.def("seed_plan", &seed_plan, py::arg("base_seed"), py::arg("replica"), py::arg("cell"));

  m.def(
      "kurschak_probe",
      [](std::size_t l, double gamma, std::uint64_t samples, std::uint64_t seed) {
        KurschakSpec spec;
        spec.l = l;
        spec.gamma = gamma;
        spec.samples = samples;
        spec.seed = seed;
        const auto e = kurschak_probe(spec);
        return py::dict(py::arg("estimate") = e.estimate, py::arg("stderr") = e.stderr_, py::arg("limit") = e.limit,
                        py::arg("samples") = e.samples);
      },
      py::arg("l"), py::arg("gamma") = 0.3, py::arg("samples") = 100000, py::arg("seed") = 1);

  m.def(
      "gap_sweep",
      [](const RateModel& model, const std::vector<int>& ls) {
        const auto rows = gap_sweep(model, EquilibriumFamily::build(model), ls);
        py::list out;
        for (const auto& r : rows)
          out.append(py::dict(py::arg("l") = r.l, py::arg("k") = r.k, py::arg("sector_size") = r.sector_size,
                              py::arg("gap") = r.gap, py::arg("gap_times_l2") = r.gap_times_l2));
        return out;
      },
      py::arg("model"), py::arg("ls"));

  m.def(
      "equivalence_sweep",
      [](const RateModel& model, double density, const std::vector<int>& ls) {
        const auto sw =
            equivalence_sweep(model, EquilibriumFamily::build(model), Cylinder::flux(model), density, ls);
        py::list pts;
        for (const auto& p : sw.points)
          pts.append(py::dict(py::arg("l") = p.l, py::arg("psi") = p.psi, py::arg("abs_error") = p.abs_error));
        return py::dict(py::arg("psi_hat") = sw.psi_hat, py::arg("fitted_slope") = sw.fitted_slope,
                        py::arg("points") = pts);
      },
      py::arg("model"), py::arg("density"), py::arg("ls"));

  m.def(
      "compare",
      [](const std::string& config_json) {
        const auto cfg = parse_run_config(Json::parse(config_json));
        CompareResult r;
        {
          py::gil_scoped_release release;
          r = run_compare(cfg);
        }
        return summary_json(r).dump();
      },
      py::arg("config_json"), "Run the corollary experiment; returns summary.json as a string.");
}
