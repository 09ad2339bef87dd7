#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavedamp/analytic.hpp"
#include "wavedamp/discrete.hpp"
#include "wavedamp/norms.hpp"
#include "wavedamp/optimize.hpp"

namespace py = pybind11;
using namespace wavedamp;

namespace {

Forcing forcing_arg(const std::string& name) { return forcing_from_string(name); }

NormConfig config_or_default(const std::optional<NormConfig>& cfg, const StringParams& params,
                             Forcing forcing) {
  return cfg ? *cfg : default_norm_config(params, forcing);
}

}  // namespace

PYBIND11_MODULE(_wavedamp, m) {
  m.doc() = "Frequency response and norms of a damped string with a point damper";

  // Translators run newest first, so the base goes in before its subclasses.
  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<InvalidGrid>(m, "InvalidGrid", PyExc_ValueError);
  py::register_exception<SingularPoint>(m, "SingularPoint", error.ptr());
  py::register_exception<PoleEncountered>(m, "PoleEncountered", error.ptr());
  py::register_exception<NormDiverged>(m, "NormDiverged", error.ptr());
  py::register_exception<SingularPencil>(m, "SingularPencil", error.ptr());
  py::register_exception<UnstableSystem>(m, "UnstableSystem", error.ptr());
  py::register_exception<FeedthroughNonzero>(m, "FeedthroughNonzero", error.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", error.ptr());

  py::class_<StringParams>(m, "StringParams")
      .def(py::init([](double length, double damping, double stiffness) {
             StringParams p{length, damping, stiffness};
             p.validate();
             return p;
           }),
           py::arg("length") = 10.0, py::arg("damping") = 0.08, py::arg("stiffness") = 1.0)
      .def_readwrite("length", &StringParams::length)
      .def_readwrite("damping", &StringParams::internal_damping)
      .def_readwrite("stiffness", &StringParams::stiffness)
      .def("modal_spacing", &StringParams::modal_spacing)
      .def("__repr__", [](const StringParams& p) {
        return "StringParams(length=" + std::to_string(p.length) +
               ", damping=" + std::to_string(p.internal_damping) +
               ", stiffness=" + std::to_string(p.stiffness) + ")";
      });

  py::class_<Damper>(m, "Damper")
      .def(py::init([](double position, double gain) { return Damper{position, gain}; }),
           py::arg("position") = 4.5, py::arg("gain") = 10.0)
      .def_readwrite("position", &Damper::position)
      .def_readwrite("gain", &Damper::gain)
      .def("__repr__", [](const Damper& d) {
        return "Damper(position=" + std::to_string(d.position) +
               ", gain=" + std::to_string(d.gain) + ")";
      });

  py::enum_<TailDecay>(m, "TailDecay")
      .value("InverseOmega", TailDecay::InverseOmega)
      .value("InverseOmegaSq", TailDecay::InverseOmegaSq);

  py::enum_<LimitCase>(m, "LimitCase")
      .value("AtZero", LimitCase::AtZero)
      .value("NoDamping", LimitCase::NoDamping)
      .value("InfiniteGain", LimitCase::InfiniteGain);

  py::class_<NormConfig>(m, "NormConfig")
      .def(py::init<>())
      .def_readwrite("omega_max", &NormConfig::omega_max)
      .def_readwrite("quad_rel_tol", &NormConfig::quad_rel_tol)
      .def_readwrite("peak_samples_per_mode", &NormConfig::peak_samples_per_mode)
      .def_readwrite("refine_iters", &NormConfig::refine_iters)
      .def_readwrite("tail_decay", &NormConfig::tail_decay)
      .def_readwrite("h2_panels", &NormConfig::h2_panels)
      .def_readwrite("h2_max_depth", &NormConfig::h2_max_depth)
      .def_readwrite("segment_cover", &NormConfig::segment_cover)
      .def("validate", &NormConfig::validate);

  m.def(
      "default_norm_config",
      [](const StringParams& params, const std::string& forcing) {
        return default_norm_config(params, forcing_arg(forcing));
      },
      py::arg("params"), py::arg("forcing") = "uniform");

  m.def(
      "output_h",
      [](Complex s, const StringParams& params, const Damper& damper,
         const std::string& forcing) {
        return output_h(s, params, damper, forcing_arg(forcing));
      },
      py::arg("s"), py::arg("params"), py::arg("damper"), py::arg("forcing") = "uniform");
  m.def(
      "uniform_h",
      [](Complex s, const StringParams& p, const Damper& d) { return uniform_h(s, p, d); },
      py::arg("s"), py::arg("params"), py::arg("damper"));
  m.def(
      "boundary_h",
      [](Complex s, const StringParams& p, const Damper& d) { return boundary_h(s, p, d); },
      py::arg("s"), py::arg("params"), py::arg("damper"));
  m.def(
      "displacement_g",
      [](double x, Complex s, const StringParams& params, const Damper& damper,
         const std::string& forcing) {
        return displacement_g(x, s, params, damper, forcing_arg(forcing));
      },
      py::arg("x"), py::arg("s"), py::arg("params"), py::arg("damper"),
      py::arg("forcing") = "uniform");
  m.def(
      "limit_h",
      [](Complex s, const StringParams& params, const Damper& damper,
         const std::string& forcing, LimitCase which) {
        return limit_h(s, params, damper, forcing_arg(forcing), which);
      },
      py::arg("s"), py::arg("params"), py::arg("damper"), py::arg("forcing"), py::arg("which"));

  m.def(
      "norm",
      [](const std::string& criterion, const StringParams& params, const Damper& damper,
         const std::string& forcing, const std::string& backend,
         const std::optional<NormConfig>& cfg) {
        const Forcing f = forcing_arg(forcing);
        return evaluate_criterion(criterion_from_string(criterion), f,
                                  backend_from_string(backend), params, damper,
                                  config_or_default(cfg, params, f));
      },
      py::arg("criterion"), py::arg("params"), py::arg("damper"),
      py::arg("forcing") = "uniform", py::arg("backend") = "analytic",
      py::arg("config") = py::none(),
      "H2 or H-inf norm of the damper-to-output response ('h2' or 'hinf').");

  py::class_<SecondOrderSystem>(m, "SecondOrderSystem")
      .def_readonly("n", &SecondOrderSystem::n)
      .def_readonly("h", &SecondOrderSystem::h)
      .def_readonly("damper_node", &SecondOrderSystem::damper_node)
      .def_readonly("feedthrough", &SecondOrderSystem::feedthrough)
      .def_readonly("input_vec", &SecondOrderSystem::input_vec)
      .def_readonly("output_vec", &SecondOrderSystem::output_vec)
      .def("dimension", &SecondOrderSystem::dimension);

  m.def(
      "discretize",
      [](int n, const StringParams& params, const Damper& damper, const std::string& forcing) {
        return discretize(n, params, damper, forcing_arg(forcing));
      },
      py::arg("n"), py::arg("params"), py::arg("damper"), py::arg("forcing") = "uniform");
  m.def("discrete_tf", &discrete_tf, py::arg("system"), py::arg("s"));
  m.def(
      "discrete_h2_lyapunov",
      [](const SecondOrderSystem& sys) { return discrete_h2_lyapunov(sys); },
      py::arg("system"));

  m.def(
      "convergence_study",
      [](const StringParams& params, const Damper& damper, const std::string& forcing,
         Complex s, const std::vector<int>& n_list) {
        const auto rows = convergence_study(params, damper, forcing_arg(forcing), s, n_list);
        py::list out;
        for (const ConvergenceRow& r : rows) {
          py::dict row;
          row["n"] = r.n;
          row["h"] = r.h;
          row["discrete"] = r.discrete;
          row["analytic"] = r.analytic;
          row["abs_error"] = r.abs_error;
          out.append(row);
        }
        py::dict result;
        result["rows"] = out;
        result["fitted_order"] =
            rows.size() >= 2 ? py::cast(fitted_order(rows)) : py::object(py::none());
        return result;
      },
      py::arg("params"), py::arg("damper"), py::arg("forcing") = "uniform",
      py::arg("s") = Complex{0.0, 1.0}, py::arg("n_list") = std::vector<int>{25, 50, 100, 200});

  m.def(
      "sweep",
      [](const std::string& criterion, const StringParams& params, const std::string& forcing,
         std::tuple<double, double, int> p_range, std::tuple<double, double, int> g_range,
         const std::string& backend, const std::optional<NormConfig>& cfg) {
        SweepSpec spec;
        spec.criterion = criterion_from_string(criterion);
        spec.forcing = forcing_arg(forcing);
        spec.backend = backend_from_string(backend);
        spec.p_range = {std::get<0>(p_range), std::get<1>(p_range), std::get<2>(p_range)};
        spec.g_range = {std::get<0>(g_range), std::get<1>(g_range), std::get<2>(g_range)};
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep(spec, params, config_or_default(cfg, params, spec.forcing));
        }
        py::dict out;
        out["positions"] = r.positions;
        out["gains"] = r.gains;
        // values[g_index][p_index]
        py::list rows;
        for (std::size_t j = 0; j < r.gains.size(); ++j) {
          std::vector<double> row(r.positions.size());
          for (std::size_t i = 0; i < row.size(); ++i) row[i] = r.at(j, i);
          rows.append(py::cast(row));
        }
        out["values"] = rows;
        out["min"] = py::make_tuple(r.min_cell.p, r.min_cell.g, r.min_cell.value);
        out["max"] = py::make_tuple(r.max_cell.p, r.max_cell.g, r.max_cell.value);
        return out;
      },
      py::arg("criterion"), py::arg("params"), py::arg("forcing"), py::arg("p_range"),
      py::arg("g_range"), py::arg("backend") = "analytic", py::arg("config") = py::none(),
      "Grid of criterion values; ranges are (lo, hi, count), gains log spaced.");

  m.def(
      "minimize",
      [](const std::string& criterion, const StringParams& params, const std::string& forcing,
         std::tuple<double, double, double, double> bounds,
         std::optional<std::vector<std::pair<double, double>>> starts, int max_iterations,
         const std::optional<NormConfig>& cfg) {
        const Forcing f = forcing_arg(forcing);
        const Bounds b{std::get<0>(bounds), std::get<1>(bounds), std::get<2>(bounds),
                       std::get<3>(bounds)};
        MinimizeOptions options;
        options.max_iterations = max_iterations;
        const auto seeds = starts ? *starts : grid_starts(b);
        OptimResult r;
        {
          py::gil_scoped_release release;
          r = minimize(criterion_from_string(criterion), f, params, b, seeds,
                       config_or_default(cfg, params, f), options);
        }
        py::dict out;
        out["p_star"] = r.p_star;
        out["g_star"] = r.g_star;
        out["value"] = r.value;
        out["evaluations"] = r.evaluations;
        out["converged"] = r.converged;
        return out;
      },
      py::arg("criterion"), py::arg("params"), py::arg("forcing"), py::arg("bounds"),
      py::arg("starts") = py::none(), py::arg("max_iterations") = 300,
      py::arg("config") = py::none(),
      "Multistart Nelder-Mead in (p, log g); bounds are (p_lo, p_hi, g_lo, g_hi).");
}
