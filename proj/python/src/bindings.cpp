#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "trpinn/boundary_data.hpp"
#include "trpinn/coeffs.hpp"
#include "trpinn/config.hpp"
#include "trpinn/error.hpp"
#include "trpinn/experiment.hpp"
#include "trpinn/losses.hpp"
#include "trpinn/model.hpp"
#include "trpinn/ntk.hpp"
#include "trpinn/quadrature.hpp"

namespace py = pybind11;
using namespace trpinn;

namespace {

py::dict report_dict(const ErrorReport& r) {
    py::dict d;
    d["rel_h1_in"] = r.rel_h1_inside;
    d["rel_l2_in"] = r.rel_l2_inside;
    d["rel_hhalf_bd"] = r.rel_h_half_boundary;
    d["rel_l2_bd"] = r.rel_l2_boundary;
    return d;
}

BoundaryFunction boundary(const std::string& kind, int v) {
    if (kind == "sin") return BoundaryFunction::sin(v);
    if (kind == "sharp") return BoundaryFunction::sharp(v);
    throw ConfigError("kind: expected sin or sharp");
}

}  // namespace

PYBIND11_MODULE(_trpinn, m) {
    m.doc() = "Trace-regularized PINN core";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    m.def("boundary_value", [](const std::string& kind, int v, double t) {
        return eval_g(boundary(kind, v), t);
    }, py::arg("kind"), py::arg("V"), py::arg("t"));

    py::class_<FourierSeries>(m, "FourierSeries")
        .def_readonly("coeffs", &FourierSeries::coeffs)
        .def_readonly("reconstruction_error", &FourierSeries::reconstruction_error)
        .def_property_readonly("modes", &FourierSeries::modes)
        .def("coefficient", &FourierSeries::coefficient)
        .def("boundary_value", &FourierSeries::boundary_value)
        .def("__call__", [](const FourierSeries& s, double x1, double x2) {
            const OracleValue o = oracle_eval(s, {x1, x2});
            return py::make_tuple(o.u, o.ux, o.uy);
        }, py::arg("x1"), py::arg("x2"), "Harmonic extension (u, ux, uy) at a disk point.");

    m.def("fit_fourier", [](const std::string& kind, int v, int samples, int modes) {
        return fit_fourier(boundary(kind, v), samples, modes);
    }, py::arg("kind"), py::arg("V"), py::arg("samples") = 4096, py::arg("modes") = 1024);

    m.def("discrete_seminorm", [](const std::vector<double>& e) { return discrete_seminorm(e); },
          py::arg("residuals"));

    m.def("seminorm_midpoint",
          [](const std::vector<double>& samples, double lower, double upper, bool periodic,
             std::optional<double> delta) {
              SeminormQuadSpec s;
              s.m = samples.size();
              s.lower = lower;
              s.upper = upper;
              s.periodic = periodic;
              s.delta = delta;
              return seminorm_midpoint(samples, s);
          },
          py::arg("samples"), py::arg("lower") = 0.0, py::arg("upper") = kTwoPi,
          py::arg("periodic") = true, py::arg("delta") = py::none(),
          "Midpoint rule; samples are taken at cell centres of a uniform grid.");
    m.def("sqrt_profile_seminorm_exact", &sqrt_profile_seminorm_exact);

    m.def("jacobi_eigen", [](const Eigen::MatrixXd& a) {
        const SymmetricEigen e = jacobi_eigen(a, true);
        return py::make_tuple(e.values, e.vectors);
    }, py::arg("a"));
    m.def("build_m", [](std::size_t n, bool skip) { return build_m(n, skip).dense(); },
          py::arg("n"), py::arg("with_skip_pairs") = false);
    m.def("m_eigenvalues",
          [](std::size_t n, bool skip) { return build_m(n, skip).eigenvalues_closed_form(); },
          py::arg("n"), py::arg("with_skip_pairs") = false);
    m.def("spectrum_compare", [](const Eigen::MatrixXd& k, std::size_t top_k, bool skip) {
        const SpectrumComparison sc = spectrum_compare(k, top_k, skip);
        return py::make_tuple(sc.lambda_p, sc.lambda_h);
    }, py::arg("kbb"), py::arg("top_k"), py::arg("with_skip_pairs") = false);

    py::class_<Mlp>(m, "Mlp")
        .def(py::init([](const std::vector<std::size_t>& sizes, std::uint64_t seed) {
                 return init_mlp(sizes, seed);
             }),
             py::arg("layer_sizes"), py::arg("seed"))
        .def_static("load", [](const std::filesystem::path& p) {
            return mlp_from_checkpoint(read_checkpoint(p));
        })
        .def_property_readonly("parameter_count", &Mlp::parameter_count)
        .def_property_readonly("layer_sizes", [](const Mlp& n) { return n.layer_sizes; })
        .def("parameters", &Mlp::flatten)
        .def("set_parameters", [](Mlp& n, const std::vector<double>& p) { n.unflatten(p); })
        .def("__call__", [](const Mlp& n, double x1, double x2) { return forward(n, {x1, x2}); })
        .def("boundary_jacobian", [](const Mlp& n, const std::vector<double>& angles) {
            return boundary_jacobian(n, boundary_from_angles(angles));
        });

    m.def("parse_config", [](const std::string& text) { return to_text(parse_config(text)); },
          py::arg("text"), "Validates config text and returns it with every key filled in.");

    m.def("train", [](const std::string& text, const std::filesystem::path& out) {
        TrainSummary s;
        {
            py::gil_scoped_release release;
            s = run_train(parse_config(text), out);
        }
        py::dict d;
        d["best"] = report_dict(s.best);
        d["best_iteration"] = s.best_iteration;
        d["final"] = report_dict(s.final_report);
        d["final_loss"] = s.final_loss;
        d["lbfgs_iterations"] = s.lbfgs_iterations;
        d["termination"] = std::string(to_string(s.termination));
        return d;
    }, py::arg("config_text"), py::arg("out_dir"));

    m.def("ntk", [](const std::string& text, const std::filesystem::path& out) {
        py::dict d;
        for (const SpectrumRun& r : run_ntk(parse_config(text), out)) {
            d[py::str(std::string(to_string(r.method)))] = py::make_tuple(r.lambda_p, r.lambda_h);
        }
        return d;
    }, py::arg("config_text"), py::arg("out_dir"));

    m.def("seminorm_check", [](const std::filesystem::path& out) {
        py::list rows;
        for (const SeminormRow& r : run_seminorm_check(out)) {
            rows.append(py::make_tuple(r.m, r.value, r.richardson, r.rel_error));
        }
        return rows;
    }, py::arg("out_dir"));

    m.def("mollify_demo", [](const std::filesystem::path& out) {
        py::list rows;
        for (const MollifyRow& r : run_mollify_demo(out)) {
            py::dict d;
            d["eps"] = r.eps;
            d["max_deviation"] = r.max_deviation;
            d["rhs_l2"] = r.rhs_l2;
            d["min_eig"] = r.min_eig;
            d["max_eig"] = r.max_eig;
            rows.append(d);
        }
        return rows;
    }, py::arg("out_dir"));
}
