#include "balaw/errors.hpp"
#include "balaw/experiments.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace balaw;

namespace {

State to_state(const std::vector<double>& v) {
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) throw InvalidArgument("state has the wrong size");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_list(const State& u) { return {u.data(), u.data() + u.size()}; }

std::vector<std::vector<double>> to_lists(const std::vector<State>& us) {
  std::vector<std::vector<double>> out;
  for (const State& u : us) out.push_back(to_list(u));
  return out;
}

SourceSpec build_source(const std::string& system, const std::string& local, const std::string& kernel,
                        double s_max) {
  const HyperbolicSystem sys = preset(system);
  const SourceSpec bare(sys, make_local_source(local, sys.dim()), ConvolutionKernel::zero(sys.dim()), s_max);
  return bare.with_kernel(make_kernel(kernel, sys.dim(), bare.c_certified()));
}

py::dict result_dict(const SuiteResult& r) {
  py::dict metrics;
  for (const Metric& m : r.metrics) metrics[py::str(m.name)] = m.value;
  py::dict d;
  d["suite"] = r.suite;
  d["preset"] = r.preset;
  d["passed"] = r.passed;
  d["metrics"] = metrics;
  d["notes"] = r.notes;
  return d;
}

py::dict calibration_dict(const CalibrationResult& c) {
  py::dict d;
  d["preset"] = c.preset;
  d["constants"] = c.constants;
  d["certified"] = c.certified;
  d["rounds"] = c.rounds;
  d["K_upsilon"] = c.ladder.k_upsilon;
  d["K_phi"] = c.ladder.k_phi;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Front tracking and operator splitting for nonlocal balance laws";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<UnknownSuite>(m, "UnknownSuite", base.ptr());
  py::register_exception<UnknownPreset>(m, "UnknownPreset", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<LeftDomain>(m, "LeftDomain", numerical.ptr());
  py::register_exception<NotInDomain>(m, "NotInDomain", numerical.ptr());

  m.def("presets", [] { return preset_names(); });

  py::class_<HyperbolicSystem>(m, "System")
      .def(py::init([](const std::string& name) { return preset(name); }), py::arg("name"))
      .def_property_readonly("name", &HyperbolicSystem::name)
      .def_property_readonly("dim", &HyperbolicSystem::dim)
      .def_property_readonly("omega_radius", &HyperbolicSystem::omega_radius)
      .def("in_domain", [](const HyperbolicSystem& s, const std::vector<double>& u) { return s.in_domain(to_state(u)); })
      .def("flux", [](const HyperbolicSystem& s, const std::vector<double>& u) { return to_list(s.flux(to_state(u))); })
      .def("eigenvalues",
           [](const HyperbolicSystem& s, const std::vector<double>& u) {
             return to_list(s.eigen_decompose(to_state(u)).lambdas);
           })
      .def("curve_rate", &HyperbolicSystem::curve_rate, py::arg("j"))
      .def("__repr__", [](const HyperbolicSystem& s) { return "<System " + s.name() + ">"; });

  m.def(
      "solve_riemann",
      [](const HyperbolicSystem& s, const std::vector<double>& ul, const std::vector<double>& ur) {
        return to_list(solve_riemann(s, to_state(ul), to_state(ur)).values);
      },
      py::arg("system"), py::arg("u_minus"), py::arg("u_plus"), "Wave strengths sigma with Psi(sigma)(u_minus) = u_plus.");
  m.def(
      "compose_psi",
      [](const HyperbolicSystem& s, const std::vector<double>& sigma, const std::vector<double>& ul) {
        return to_list(compose_psi(s, StrengthVector(to_state(sigma)), to_state(ul)));
      },
      py::arg("system"), py::arg("sigma"), py::arg("u_minus"));
  m.def(
      "psi_states",
      [](const HyperbolicSystem& s, const std::vector<double>& sigma, const std::vector<double>& ul) {
        return to_lists(psi_states(s, StrengthVector(to_state(sigma)), to_state(ul)));
      },
      py::arg("system"), py::arg("sigma"), py::arg("u_minus"));

  py::class_<PiecewiseConstantFn>(m, "Profile")
      .def(py::init([](const std::vector<double>& x, const std::vector<std::vector<double>>& v) {
             std::vector<State> values;
             for (const auto& s : v) values.push_back(to_state(s));
             return PiecewiseConstantFn(x, std::move(values));
           }),
           py::arg("breakpoints"), py::arg("values"))
      .def_static(
          "from_steps",
          [](const std::vector<std::pair<double, std::vector<double>>>& steps) {
            if (steps.empty()) throw InvalidArgument("from_steps needs at least one step");
            std::vector<std::pair<double, State>> s;
            for (const auto& [x, v] : steps) s.emplace_back(x, to_state(v));
            return PiecewiseConstantFn::from_steps(static_cast<int>(steps.front().second.size()), s);
          },
          py::arg("steps"), "u = v_k on (x_k, x_{k+1}], zero outside.")
      .def_static("zero", [](int n) { return PiecewiseConstantFn(n); }, py::arg("n"))
      .def_property_readonly("dim", &PiecewiseConstantFn::dim)
      .def_property_readonly("breakpoints", &PiecewiseConstantFn::breakpoints)
      .def_property_readonly("values", [](const PiecewiseConstantFn& u) { return to_lists(u.values()); })
      .def_property_readonly("jumps", &PiecewiseConstantFn::jumps)
      .def("__call__", [](const PiecewiseConstantFn& u, double x) { return to_list(u(x)); })
      .def("total_variation", &total_variation)
      .def("l1_norm", &l1_norm)
      .def("sup_norm", &PiecewiseConstantFn::sup_norm)
      .def("__eq__", [](const PiecewiseConstantFn& a, const PiecewiseConstantFn& b) { return a == b; })
      .def("__repr__", [](const PiecewiseConstantFn& u) {
        return "<Profile dim=" + std::to_string(u.dim()) + " jumps=" + std::to_string(u.jumps()) + ">";
      });
  m.def("l1_distance", &l1_distance, py::arg("u"), py::arg("v"));

  py::class_<FunctionalConstants>(m, "Constants")
      .def(py::init([](double c0, double k1, double k2, double delta) { return FunctionalConstants{c0, k1, k2, delta}; }),
           py::arg("C0") = 4.0, py::arg("kappa1") = 10.0, py::arg("kappa2") = 10.0, py::arg("delta") = 0.1)
      .def_readwrite("C0", &FunctionalConstants::C0)
      .def_readwrite("kappa1", &FunctionalConstants::kappa1)
      .def_readwrite("kappa2", &FunctionalConstants::kappa2)
      .def_readwrite("delta", &FunctionalConstants::delta)
      .def("__repr__", [](const FunctionalConstants& c) {
        return "Constants(C0=" + format_number(c.C0) + ", kappa1=" + format_number(c.kappa1) +
               ", kappa2=" + format_number(c.kappa2) + ", delta=" + format_number(c.delta) + ")";
      });

  m.def(
      "upsilon",
      [](const HyperbolicSystem& s, const PiecewiseConstantFn& u, const FunctionalConstants& c) {
        return upsilon(decompose(s, u), s.field_kinds(), c);
      },
      py::arg("system"), py::arg("u"), py::arg("constants") = FunctionalConstants{});
  m.def(
      "interaction_potential",
      [](const HyperbolicSystem& s, const PiecewiseConstantFn& u) {
        return interaction_potential(decompose(s, u), s.field_kinds());
      },
      py::arg("system"), py::arg("u"));
  m.def(
      "stability_functional",
      [](const HyperbolicSystem& s, const PiecewiseConstantFn& v, const PiecewiseConstantFn& w,
         const FunctionalConstants& c) { return stability_functional(s, v, w, c); },
      py::arg("system"), py::arg("v"), py::arg("w"),
        py::arg("constants") = FunctionalConstants{});

  py::class_<SourceSpec>(m, "Source")
      .def(py::init(&build_source), py::arg("system"), py::arg("local") = "LinearDamping(1)",
           py::arg("kernel") = "Zero", py::arg("s_max") = 0.01)
      .def_property_readonly("system", &SourceSpec::system)
      .def_property_readonly("c", &SourceSpec::c_certified)
      .def_property_readonly("kernel_l1", [](const SourceSpec& s) { return s.kernel().l1_norm(); })
      .def_property_readonly("s_max", &SourceSpec::s_max)
      .def("kernel_within_cap", &SourceSpec::kernel_within_cap, py::arg("ratio") = 0.05);

  m.def(
      "homogeneous_flow",
      [](const HyperbolicSystem& s, double t, const PiecewiseConstantFn& u, double ft_epsilon) {
        return homogeneous_flow(s, t, u, ft_epsilon);
      },
      py::arg("system"), py::arg("t"), py::arg("u"), py::arg("ft_epsilon"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "euler_polygonal",
      [](const SourceSpec& spec, const PiecewiseConstantFn& u0, double t, double epsilon, int n_cells) {
        SplittingOptions opts;
        opts.n_cells = n_cells;
        PolygonalRun run;
        {
          py::gil_scoped_release release;
          run = euler_polygonal(spec, u0, t, epsilon, opts);
        }
        py::list trace;
        for (const TracePoint& p : run.trace) {
          py::dict d;
          d["t"] = p.t;
          d["upsilon"] = p.report.upsilon;
          d["V"] = p.report.V;
          d["l1"] = p.l1;
          d["jumps"] = p.jumps;
          trace.append(d);
        }
        py::dict out;
        out["profile"] = run.final_profile;
        out["epsilon"] = run.epsilon;
        out["ft_epsilon"] = run.ft_epsilon;
        out["n_cells"] = run.n_cells;
        out["events"] = run.events;
        out["max_fronts"] = run.max_fronts;
        out["trace"] = trace;
        return out;
      },
      py::arg("source"), py::arg("u0"), py::arg("t"), py::arg("epsilon"), py::arg("n_cells") = -1);

  m.def(
      "converge",
      [](const SourceSpec& spec, const PiecewiseConstantFn& u0, double t, const std::vector<double>& ladder) {
        ConvergenceTable table;
        {
          py::gil_scoped_release release;
          table = converge_semigroup(spec, u0, t, ladder);
        }
        py::list rows;
        for (const ConvergenceRow& r : table.rows) rows.append(py::make_tuple(r.epsilon, r.distance));
        py::dict out;
        out["profile"] = table.profile;
        out["rows"] = rows;
        out["error_estimate"] = table.error_estimate;
        out["cauchy"] = !table.non_cauchy;
        return out;
      },
      py::arg("source"), py::arg("u0"), py::arg("t"), py::arg("epsilon_ladder"),
      "Polygonal approximations along a halving ladder and their Cauchy distances.");

  m.def("suite_names", [] { return suite_names(); });
  m.def(
      "run",
      [](const std::filesystem::path& config) {
        RunReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(load_experiment(config));
        }
        py::list results;
        for (const SuiteResult& r : report.results) results.append(result_dict(r));
        py::list calibrations;
        for (const CalibrationResult& c : report.calibrations) calibrations.append(calibration_dict(c));
        py::dict out;
        out["directory"] = report.directory;
        out["passed"] = report.passed();
        out["results"] = results;
        out["calibrations"] = calibrations;
        return out;
      },
      py::arg("config"), "Runs a config file; outputs go under $BALAW_OUTPUT_ROOT or [run] output.");
  m.def(
      "calibrate",
      [](const std::filesystem::path& config) {
        std::vector<CalibrationResult> cals;
        {
          py::gil_scoped_release release;
          cals = run_calibration(load_experiment(config));
        }
        py::list out;
        for (const CalibrationResult& c : cals) out.append(calibration_dict(c));
        return out;
      },
      py::arg("config"));
}
