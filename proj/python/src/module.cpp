#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nmkerr/config.hpp"
#include "nmkerr/dynamics.hpp"
#include "nmkerr/errors.hpp"
#include "nmkerr/kernels.hpp"
#include "nmkerr/noise.hpp"
#include "nmkerr/stability.hpp"
#include "nmkerr/steadystate.hpp"

namespace py = pybind11;
using namespace nmk;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<cplx> to_array(const std::vector<cplx>& v) {
  return py::array_t<cplx>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict noise_dict(const NoiseResult& r) {
  py::dict d;
  d["var_x"] = r.var_x;
  d["var_y"] = r.var_y;
  d["fano"] = r.fano;
  d["method"] = r.method == NoiseMethod::ExactIntegral ? "exact" : "adiabatic";
  d["gamma2"] = r.gamma2;
  d["error_estimate"] = r.error_estimate;
  d["adiabatic_advisory"] = r.adiabatic_advisory;
  return d;
}

py::dict trajectory_dict(const Trajectory& tr) {
  py::dict d;
  d["t"] = to_array(tr.t);
  d["alpha"] = to_array(tr.alpha);
  d["n"] = to_array(tr.n);
  if (!tr.d.empty()) d["d"] = to_array(tr.d);
  d["dt"] = tr.dt;
  d["method"] = tr.method;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kerr cavities with frequency-dependent loss";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const NumericalError& e) {
      py::object err = numerical_error;
      PyObject* inst = PyObject_CallFunction(err.ptr(), "s", e.what());
      if (inst) {
        PyObject_SetAttrString(inst, "kind", py::str(e.kind()).ptr());
        PyErr_SetObject(err.ptr(), inst);
        Py_DECREF(inst);
      }
    }
  });

  py::enum_<Stability>(m, "Stability")
      .value("Unknown", Stability::Unknown)
      .value("Stable", Stability::Stable)
      .value("SaddleUnstable", Stability::SaddleUnstable)
      .value("MIUnstable", Stability::MIUnstable);

  py::class_<KernelModel>(m, "KernelModel")
      .def_static("markovian", &KernelModel::markovian, py::arg("gamma"))
      .def_static("friedrich_wintgen", &KernelModel::friedrich_wintgen, py::arg("kappa"),
                  py::arg("gamma"), py::arg("omega_d"))
      .def_static("fano_mirror", &KernelModel::fano_mirror, py::arg("kappa"), py::arg("r_d"),
                  py::arg("t_d"), py::arg("sigma"), py::arg("round_trip"),
                  py::arg("theta1") = py::none(), py::arg("theta2") = py::none())
      .def("with_background", &KernelModel::with_background, py::arg("kappa_bg"))
      .def("loss", &KernelModel::loss, py::arg("omega"))
      .def("coupling", &KernelModel::coupling, py::arg("omega"))
      .def("period", &KernelModel::period)
      .def("memory_time", &KernelModel::memory_time)
      .def_property_readonly("name", &KernelModel::name)
      .def_property_readonly("background", &KernelModel::background);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](double beta, const KernelModel& k, double omega_a) {
             SystemParams s{omega_a, beta, k};
             s.validate();
             return s;
           }),
           py::arg("beta"), py::arg("kernel"), py::arg("omega_a") = 1.0)
      .def_readonly("omega_a", &SystemParams::omega_a)
      .def_readonly("beta", &SystemParams::beta)
      .def_readonly("kernel", &SystemParams::kernel);

  m.def("load_model", [](const std::string& path, const std::string& units) {
    return load_model(path, units).system;
  }, py::arg("path"), py::arg("units") = "");

  m.def("kk_residual", [](const KernelModel& k, const std::vector<double>& w) {
    return kk_residual(k, w);
  });
  m.def("sum_rule", [](const SystemParams& s) { return sum_rule_check(s).value; });

  m.def("steady_roots", [](const SystemParams& s, double omega_p, double flux) {
    std::vector<double> n;
    for (const auto& r : steady_roots(s, {omega_p, flux})) n.push_back(r.n);
    return n;
  }, py::arg("system"), py::arg("omega_p"), py::arg("flux"));
  m.def("pump_for_n", &pump_for_n, py::arg("system"), py::arg("omega_p"), py::arg("n"));

  m.def("variance_exact", [](const SystemParams& s, double omega_p, double n) {
    return noise_dict(variance_exact(linearize(s, omega_p, n)));
  }, py::arg("system"), py::arg("omega_p"), py::arg("n"));
  m.def("variance_adiabatic", [](const SystemParams& s, double omega_p, double n) {
    return noise_dict(variance_adiabatic(linearize(s, omega_p, n)));
  }, py::arg("system"), py::arg("omega_p"), py::arg("n"));

  m.def("classify", [](const SystemParams& s, double omega_p, double n) {
    const auto r = classify(s, omega_p, n);
    py::dict d;
    d["cls"] = r.cls;
    d["mi_gain"] = r.mi_gain;
    d["re_lambda_max"] = r.re_lambda_max;
    d["im_lambda"] = r.im_lambda;
    d["pulse_freq"] = r.pulse_freq;
    d["eigenvalues"] = r.eigenvalues;
    d["method"] = r.method;
    return d;
  }, py::arg("system"), py::arg("omega_p"), py::arg("n"));

  m.def("phase_diagram", [](const SystemParams& s, const std::vector<double>& w,
                            const std::vector<double>& n, unsigned threads) {
    const auto pd = phase_diagram(s, w, n, threads);
    py::array_t<int> cls({n.size(), w.size()});
    py::array_t<double> gain({n.size(), w.size()});
    auto c = cls.mutable_unchecked<2>();
    auto g = gain.mutable_unchecked<2>();
    for (std::size_t j = 0; j < n.size(); ++j)
      for (std::size_t i = 0; i < w.size(); ++i) {
        c(j, i) = static_cast<int>(pd.at(i, j).cls);
        g(j, i) = pd.at(i, j).mi_gain;
      }
    return py::make_tuple(cls, gain);
  }, py::arg("system"), py::arg("omega_p"), py::arg("n"), py::arg("threads") = 0);

  m.def("simulate_two_mode", [](const SystemParams& s, double omega_p, double n, double t_end,
                                double dt, double kick) {
    const auto fp = two_mode_fixed_point(s, omega_p, n);
    SimOptions o;
    o.pump_phase = fp.pump_phase;
    o.expected_n = n;
    const auto tr = simulate_two_mode(s, {omega_p, fp.flux}, t_end, dt,
                                      {fp.state.alpha * (1.0 + kick), fp.state.d}, o);
    return trajectory_dict(tr);
  }, py::arg("system"), py::arg("omega_p"), py::arg("n"), py::arg("t_end"), py::arg("dt"),
        py::arg("kick") = 0.01);

  m.def("simulate_split_step", [](const SystemParams& s, double omega_p, double n, double t_end,
                                  double dt, double kick) {
    const auto ss = steady_state_at(s, omega_p, n);
    SimOptions o;
    o.pump_phase = ss.pump_phase;
    o.expected_n = n;
    const auto tr = simulate_split_step(s, {omega_p, pump_for_n(s, omega_p, n)}, t_end, dt,
                                        ss.alpha0 * (1.0 + kick), o);
    return trajectory_dict(tr);
  }, py::arg("system"), py::arg("omega_p"), py::arg("n"), py::arg("t_end"), py::arg("dt"),
        py::arg("kick") = 0.01);
}
