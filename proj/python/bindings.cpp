#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cnnac/errors.hpp"
#include "cnnac/gradcheck.hpp"
#include "cnnac/jacobian.hpp"
#include "cnnac/network.hpp"
#include "cnnac/presets.hpp"
#include "cnnac/scenario.hpp"
#include "cnnac/sim.hpp"

namespace py = pybind11;
using namespace cnnac;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Mat to_mat(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array");
  return Mat::from_rowmajor(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                            std::span<const double>(a.data(), static_cast<std::size_t>(a.size())));
}

Vec to_vec(const Array& a) {
  if (a.ndim() != 1) throw ShapeError("expected a 1-D array");
  return Vec(a.data(), a.data() + a.size());
}

Array from_mat(const Mat& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Array from_vec(std::span<const double> v) {
  return Array(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

// Stacks one Vec field of every sample into a (samples x n) array.
template <typename Field>
Array stack(const RunResult& r, Field field) {
  const std::size_t n = r.samples.empty() ? 0 : field(r.samples.front()).size();
  Array out({r.samples.size(), n});
  double* p = out.mutable_data();
  for (const auto& s : r.samples)
    for (double v : field(s)) *p++ = v;
  return out;
}

}  // namespace

PYBIND11_MODULE(_cnnac, m) {
  m.doc() = "Convolutional-network adaptive controller core";

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<LayoutError>(m, "LayoutError", config_error.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

  py::class_<NetworkSpec>(m, "NetworkSpec")
      .def(py::init<>())
      .def_readwrite("input_rows", &NetworkSpec::input_rows)
      .def_readwrite("input_cols", &NetworkSpec::input_cols)
      .def_property(
          "conv_layers",
          [](const NetworkSpec& s) {
            std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
            for (const auto& l : s.conv_layers) out.emplace_back(l.filter_rows, l.filter_cols, l.filter_count);
            return out;
          },
          [](NetworkSpec& s, const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>& layers) {
            s.conv_layers.clear();
            for (const auto& [p, c, q] : layers) s.conv_layers.push_back({p, c, q});
          })
      .def_readwrite("fc_widths", &NetworkSpec::fc_widths)
      .def_readwrite("alpha1", &NetworkSpec::alpha1)
      .def_readwrite("alpha2", &NetworkSpec::alpha2)
      .def("validate", &NetworkSpec::validate)
      .def("weight_count", &NetworkSpec::weight_count)
      .def("output_dim", &NetworkSpec::output_dim)
      .def_property_readonly("dnn_mode", &NetworkSpec::dnn_mode)
      .def("describe_weight", [](const NetworkSpec& s, std::size_t i) { return WeightLayout(s).describe(i); });

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("network", &Scenario::network)
      .def_readwrite("stacking_time", &Scenario::stacking_time)
      .def_readwrite("delta_bar", &Scenario::delta_bar)
      .def_property(
          "x0", [](const Scenario& s) { return s.plant.x0; }, [](Scenario& s, const Vec& v) { s.plant.x0 = v; })
      .def_property(
          "t_g", [](const Scenario& s) { return s.plant.t_g; }, [](Scenario& s, double v) { s.plant.t_g = v; })
      .def_property(
          "k_s", [](const Scenario& s) { return s.controller.k_s; },
          [](Scenario& s, double v) { s.controller.k_s = v; })
      .def_property(
          "rho", [](const Scenario& s) { return s.controller.rho; },
          [](Scenario& s, double v) { s.controller.rho = v; })
      .def_property(
          "theta_bar", [](const Scenario& s) { return s.controller.theta_bar; },
          [](Scenario& s, double v) { s.controller.theta_bar = v; })
      .def_property(
          "gamma", [](const Scenario& s) { return std::pair{s.controller.gamma.fc, s.controller.gamma.conv}; },
          [](Scenario& s, std::pair<double, double> g) { s.controller.gamma = {g.first, g.second}; })
      .def_property(
          "a_c", [](const Scenario& s) { return from_mat(s.controller.a_c); },
          [](Scenario& s, const Array& a) { s.controller.a_c = to_mat(a); })
      .def_property(
          "dt", [](const Scenario& s) { return s.sim.dt; }, [](Scenario& s, double v) { s.sim.dt = v; })
      .def_property(
          "t_end", [](const Scenario& s) { return s.sim.t_end; }, [](Scenario& s, double v) { s.sim.t_end = v; })
      .def_property(
          "seed", [](const Scenario& s) { return s.sim.seed; },
          [](Scenario& s, std::uint64_t v) { s.sim.seed = v; })
      .def_property(
          "oracle", [](const Scenario& s) { return s.sim.feedforward == Feedforward::Oracle; },
          [](Scenario& s, bool v) { s.sim.feedforward = v ? Feedforward::Oracle : Feedforward::Network; })
      .def("validate", &Scenario::validate)
      .def("__repr__", [](const Scenario& s) { return "<Scenario " + s.name + ">"; });

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("name", &RunResult::name)
      .def_property_readonly("t",
                             [](const RunResult& r) {
                               Vec t;
                               for (const auto& s : r.samples) t.push_back(s.t);
                               return from_vec(t);
                             })
      .def_property_readonly("x", [](const RunResult& r) { return stack(r, [](const Sample& s) { return s.x; }); })
      .def_property_readonly("x_d",
                             [](const RunResult& r) { return stack(r, [](const Sample& s) { return s.x_d; }); })
      .def_property_readonly("e", [](const RunResult& r) { return stack(r, [](const Sample& s) { return s.e; }); })
      .def_property_readonly("u", [](const RunResult& r) { return stack(r, [](const Sample& s) { return s.u; }); })
      .def_property_readonly("phi_hat",
                             [](const RunResult& r) { return stack(r, [](const Sample& s) { return s.phi_hat; }); })
      .def_readonly("rmse", &RunResult::rmse)
      .def_readonly("post_change", &RunResult::post_change)
      .def_readonly("max_theta_norm", &RunResult::max_theta_norm)
      .def_readonly("max_jacobian_norm", &RunResult::max_jacobian_norm)
      .def_readonly("weight_count", &RunResult::weight_count);

  m.def("preset", &make_preset, py::arg("name"), "Built-in scenario by name");
  m.def("preset_names", &preset_names);
  m.def("reference_rmse", &reference_rmse, py::arg("name"), "Published (eps1, eps2) or None");
  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<string>");
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("emit_scenario", &emit_scenario, py::arg("scenario"));

  m.def(
      "cnn_operator",
      [](const Array& x, const std::vector<Array>& filters, const Vec& biases) {
        std::vector<Mat> fs;
        for (const auto& f : filters) fs.push_back(to_mat(f));
        return from_mat(cnn_operator(to_mat(x), fs, biases));
      },
      py::arg("x"), py::arg("filters"), py::arg("biases"));

  m.def(
      "forward",
      [](const NetworkSpec& spec, const Array& theta, const Array& x) {
        return from_vec(forward(spec, to_vec(theta), to_mat(x)).output);
      },
      py::arg("spec"), py::arg("theta"), py::arg("x"), "Network output for weights theta and input matrix x");

  m.def(
      "jacobian",
      [](const NetworkSpec& spec, const Array& theta, const Array& x) {
        const Vec th = to_vec(theta);
        const ForwardTrace trace = forward(spec, th, to_mat(x));
        return from_mat(assemble_full_jacobian(spec, trace, th).matrix);
      },
      py::arg("spec"), py::arg("theta"), py::arg("x"), "d output / d theta, shape (outputs, weights)");

  m.def(
      "simulate",
      [](const Scenario& sc) {
        py::gil_scoped_release release;
        return simulate(sc);
      },
      py::arg("scenario"));

  m.def(
      "gradcheck",
      [](const std::string& arch, std::size_t trials, double step, std::uint64_t seed, double tolerance) {
        GradcheckOptions opt;
        opt.trials = trials;
        opt.step = step;
        opt.seed = seed;
        opt.tolerance = tolerance;
        const GradcheckReport rep = run_gradcheck(gradcheck_architecture(arch), opt);
        py::dict out;
        out["max_rel_err"] = rep.max_rel_err;
        out["passed"] = rep.passed;
        out["weights"] = rep.entries.size();
        return out;
      },
      py::arg("arch") = "minimal", py::arg("trials") = 20, py::arg("step") = 1e-6, py::arg("seed") = 1,
      py::arg("tolerance") = 1e-6);
}
