#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kreinlab/disc.hpp"
#include "kreinlab/error.hpp"
#include "kreinlab/experiments.hpp"
#include "kreinlab/femlab.hpp"
#include "kreinlab/halfline.hpp"
#include "kreinlab/specfun.hpp"

namespace py = pybind11;
using namespace kreinlab;

namespace {

py::array_t<double> array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

disc::DiscConfig disc_config(double alpha, double b, double theta_plus, int grid_n, double shift_k) {
  return {alpha, b, theta_plus, grid_n, shift_k};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Krein resolvent difference spectra: half-line, disc and finite-element models";

  // translators run newest first, so the base class goes first
  py::register_exception<Error>(m, "KreinlabError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("bessel_i", [](int order, double x) { return specfun::bessel_i(order, x).value; }, py::arg("m"), py::arg("x"));
  m.def("bessel_i_log", [](int order, double x) { return specfun::bessel_i_log(order, x).log_value; },
        py::arg("m"), py::arg("x"));
  m.def("bessel_j_zeros", &specfun::bessel_j_zeros, py::arg("m"), py::arg("count"));

  m.def("constants", [](int n, double arc, double boundary, double domain) {
    const auto r = experiments::constants(n, arc, boundary, domain);
    return py::dict(py::arg("n") = r.n, py::arg("c_n") = r.c_n, py::arg("C0_plus") = r.C0_plus,
                    py::arg("C0") = r.C0, py::arg("C_A") = r.C_A);
  }, py::arg("n") = 2, py::arg("arc_length") = 3.141592653589793, py::arg("boundary_length") = 6.283185307179586,
        py::arg("domain_measure") = 3.141592653589793);

  m.def("weyl_fit", [](const std::vector<double>& s, double p, std::size_t j_lo, std::size_t j_hi, int order,
                       double q, double predicted) {
    const auto f = experiments::weyl_fit(s, p, j_lo, j_hi, order, q, predicted);
    return py::dict(py::arg("raw") = f.raw, py::arg("extrapolated") = f.extrapolated,
                    py::arg("coefficients") = f.coefficients, py::arg("relative_error") = f.relative_error,
                    py::arg("fit_residual") = f.fit_residual, py::arg("ill_conditioned") = f.ill_conditioned);
  }, py::arg("s"), py::arg("p"), py::arg("j_lo"), py::arg("j_hi"), py::arg("order") = 1, py::arg("q") = 0.5,
        py::arg("predicted") = std::numeric_limits<double>::quiet_NaN());

  m.def("dtn_modes", [](double alpha, int mode_cut) { return array(disc::dtn_modal(alpha, mode_cut).values); },
        py::arg("alpha"), py::arg("mode_cut"));
  m.def("poisson_gram_modes",
        [](double alpha, int mode_cut) { return array(disc::poisson_gram_modal(alpha, mode_cut).values); },
        py::arg("alpha"), py::arg("mode_cut"));
  m.def("full_boundary_spectrum",
        [](double alpha, double b, int mode_cut) { return array(disc::full_boundary_spectrum(alpha, b, mode_cut)); },
        py::arg("alpha") = 1.0, py::arg("b") = 0.0, py::arg("mode_cut") = 1024);

  m.def("krein_spectrum", [](std::string route, double alpha, double b, double theta_plus, int grid_n,
                             double shift_k) {
    const auto cfg = disc_config(alpha, b, theta_plus, grid_n, shift_k);
    py::gil_scoped_release release;
    if (route == "neumann") {
      disc::validate(cfg, true);
      return disc::krein_spectrum_neumann_ref(cfg).values;
    }
    if (route != "a" && route != "b") throw ConfigError("route must be a, b or neumann");
    disc::validate(cfg);
    const auto k = disc::krein_spectrum_dirichlet_ref(cfg);
    return route == "a" ? k.route_a.values : k.route_b.values;
  }, py::arg("route") = "b", py::arg("alpha") = 1.0, py::arg("b") = 0.0, py::arg("theta_plus") = 3.141592653589793,
        py::arg("grid_n") = 1024, py::arg("shift_k") = 0.2);

  m.def("halfline_check", [](double alpha, double extent, int grid_n) {
    const auto g = halfline::make_grid(extent, grid_n);
    const auto mask = halfline::plus_mask(g);
    halfline::DecompositionReport t;
    halfline::FactorizationReport f;
    {
      py::gil_scoped_release release;
      t = halfline::decomposition_check(alpha, g, mask);
      f = halfline::factorization_check(alpha, g, mask);
    }
    return py::dict(py::arg("residual_fft") = t.residual_fft, py::arg("residual_kernel") = t.residual_kernel,
                    py::arg("hankel_gap") = t.hankel_gap, py::arg("adjoint_gap") = t.adjoint_gap,
                    py::arg("factorization_right") = f.right_residual,
                    py::arg("factorization_left") = f.left_residual,
                    py::arg("plus_leakage") = f.plus_leakage_cut, py::arg("minus_leakage") = f.minus_leakage_cut);
  }, py::arg("alpha") = 1.0, py::arg("extent") = 20.0, py::arg("grid_n") = 1024);

  m.def("fem_eigenvalues", [](std::string geometry, int n_r, int n_theta, double alpha, double theta_plus, double b,
                              int count) {
    const auto mesh = femlab::build_mesh(femlab::geometry_from_string(geometry), n_r, n_theta);
    const auto sys = femlab::assemble(mesh, alpha, femlab::BoundaryCondition::mixed(theta_plus, b));
    py::gil_scoped_release release;
    return femlab::realization_spectrum(sys, count);
  }, py::arg("geometry") = "half-disc", py::arg("n_r") = 32, py::arg("n_theta") = 64, py::arg("alpha") = 1.0,
        py::arg("theta_plus") = 0.0, py::arg("b") = 0.0, py::arg("count") = 4);

  m.def("fem_resolvent_difference", [](int n_r, int n_theta, double alpha, double theta_plus, double b) {
    const auto mesh = femlab::build_mesh(femlab::Geometry::disc, n_r, n_theta);
    py::gil_scoped_release release;
    return femlab::resolvent_difference_spectrum(mesh, alpha, theta_plus, b, 0).values;
  }, py::arg("n_r") = 16, py::arg("n_theta") = 32, py::arg("alpha") = 1.0, py::arg("theta_plus") = 3.141592653589793,
        py::arg("b") = 0.0);

  m.def("half_disc_exact", &femlab::half_disc_mixed_exact, py::arg("alpha"), py::arg("upper"));

  m.def("run_experiment", [](const std::string& config_json, const std::string& out_dir) {
    std::string summary;
    int code;
    {
      py::gil_scoped_release release;
      code = experiments::run_experiment_text(config_json, out_dir, &summary);
    }
    return py::make_tuple(code, summary);
  }, py::arg("config_json"), py::arg("out_dir") = "");
}
