#include "sumscale/harness.hpp"
#include "sumscale/oracle.hpp"
#include "sumscale/problems.hpp"
#include "sumscale/projections.hpp"
#include "sumscale/solvers.hpp"
#include "sumscale/transforms.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace sumscale;

namespace {

Eigen::MatrixXd dense(const SymmetricMatrix& m) {
    Eigen::MatrixXd out(m.order(), m.order());
    for (Index i = 0; i < m.order(); ++i) {
        for (Index j = 0; j < m.order(); ++j) out(i, j) = m(i, j);
    }
    return out;
}

SymmetricMatrix symmetric(const Eigen::MatrixXd& a) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(a.rows()));
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(a(i, j));
    }
    return SymmetricMatrix::from_rows(rows);
}

py::dict row_to_dict(const Row& r) {
    py::dict d;
    d["problem"] = r.problem;
    d["n"] = r.n;
    d["reformulation"] = r.reformulation;
    d["method"] = r.method;
    d["gradient"] = r.gradient;
    d["bounds"] = r.bounds;
    d["parameters"] = r.parameters;
    d["raw"] = r.raw;
    d["value"] = r.value;
    d["fevals"] = r.fevals;
    d["gevals"] = r.gevals;
    d["hevals"] = r.hevals;
    d["conv"] = r.conv;
    d["kkt1"] = r.kkt1;
    d["kkt2"] = r.kkt2;
    d["time_s"] = r.time_s;
    d["canonical_error"] = r.canonical_error;
    d["status"] = r.status;
    return d;
}

py::dict report_to_dict(const SolveReport& r) {
    py::dict d;
    d["parameters"] = r.parameters;
    d["value"] = r.value;
    d["fevals"] = r.fevals;
    d["gevals"] = r.gevals;
    d["iterations"] = r.iterations;
    d["conv"] = r.convergence_code;
    d["message"] = r.message;
    return d;
}

}  // namespace

PYBIND11_MODULE(_sumscale, m) {
    m.doc() = "Optimization of functions with sum and scale constraints";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ArithmeticError);
    py::register_exception<InfeasiblePoint>(m, "InfeasiblePoint", PyExc_ValueError);

    // objectives
    m.def("neg_prod_scaled", &neg_prod_scaled);
    m.def("neg_prod_loo", &neg_prod_loo);
    m.def("nll", &nll);
    m.def("nll_grad", &nll_grad);
    m.def("enll", &enll);
    m.def("enll_grad", &enll_grad);
    m.def("xnll", &xnll);
    m.def("nllrv", &nllrv);
    m.def("rosbkext", &rosbkext);
    m.def("rosbkext_grad", &rosbkext_grad);
    m.def("heq", &heq);
    m.def("weighted_ssq_scaled", &weighted_ssq_scaled);
    m.def("weighted_ssq_raw", &weighted_ssq_raw);
    m.def("moler_matrix", [](Index n) { return dense(moler_matrix(n)); }, py::arg("n"));
    m.def("rayleigh_quotient", [](const Vector& x, const Eigen::MatrixXd& a) {
        return rayleigh_quotient(x, symmetric(a));
    });
    m.def("problem_names", &problem_names);
    m.def("problem_value", [](const std::string& name, Index n, const Vector& x) {
        return make_problem(name, n).objective(x);
    }, py::arg("problem"), py::arg("n"), py::arg("x"));

    // transforms and projections
    m.def("spherical_to_cartesian", &spherical_to_cartesian);
    m.def("canonical_error", [](const Vector& raw, const Vector& known, const std::string& mode) {
        return canonical_error(raw, known, canonical_mode_from_string(mode));
    }, py::arg("raw"), py::arg("known"), py::arg("mode") = "sum-scale");
    m.def("project", [](const std::string& name, const Vector& x, std::optional<std::pair<double, double>> box) {
        if (box) {
            const Bounds b = Bounds::uniform(x.size(), box->first, box->second);
            return projection_from_name(name, &b)(x);
        }
        return projection_from_name(name)(x);
    }, py::arg("name"), py::arg("x"), py::arg("bounds") = py::none());

    // solvers
    m.def("spg", [](const Objective& f, const std::optional<Gradient>& g, const std::string& projection,
                    const Vector& x0, int maxit) {
        SolverConfig c;
        c.max_iterations = maxit;
        return report_to_dict(spg(f, g.value_or(Gradient{}), projection_from_name(projection), x0, c));
    }, py::arg("objective"), py::arg("gradient") = py::none(), py::arg("projection") = "simplex", py::arg("x0"),
       py::arg("maxit") = 1500, "Spectral projected gradient on a Python objective.");
    m.def("solve_eq_qp", [](const Eigen::MatrixXd& d_matrix, const Vector& d, const Eigen::MatrixXd& a,
                            const Vector& b) {
        const QpSolution s = solve_eq_qp(symmetric(d_matrix), d, a, b);
        py::dict out;
        out["solution"] = s.solution;
        out["multipliers"] = s.multipliers;
        out["problem_value"] = s.problem_value;
        out["kkt_residual"] = s.kkt_residual;
        return out;
    });
    m.def("jacobi_eigen", [](const Eigen::MatrixXd& a) {
        const EigenDecomposition e = jacobi_eigen(symmetric(a));
        Eigen::MatrixXd vectors(a.rows(), static_cast<Index>(e.vectors.size()));
        for (std::size_t k = 0; k < e.vectors.size(); ++k) vectors.col(static_cast<Index>(k)) = e.vectors[k];
        return py::make_tuple(e.values, vectors);
    }, "Ascending eigenvalues and the matching unit eigenvectors as columns.");

    // harness
    m.def("run", [](const std::string& problem, Index n, const std::string& method, const std::string& reform,
                    const std::string& gradient, std::optional<std::pair<double, double>> bounds,
                    std::optional<std::uint64_t> seed, const std::string& projection) {
        RunSpec s;
        s.problem = problem;
        s.n = n;
        s.method = method;
        s.reformulation = reform;
        s.gradient = gradient_mode_from_string(gradient);
        s.bounds = bounds;
        s.projection = projection;
        if (seed) {
            s.start.kind = StartSpec::Kind::seeded_uniform;
            s.start.seed = *seed;
        }
        Row r;
        {
            py::gil_scoped_release release;
            r = run_contained(s);
        }
        return row_to_dict(r);
    }, py::arg("problem"), py::arg("n"), py::arg("method") = "vm", py::arg("reform") = "identity",
       py::arg("gradient") = "analytic", py::arg("bounds") = py::none(), py::arg("seed") = py::none(),
       py::arg("projection") = "", "One run; failures come back as rows with conv != 0.");
    m.def("run_suite", [](const std::string& config_json, const std::string& format, bool include_time) {
        const auto specs = parse_suite(config_json);
        BenchmarkTable t;
        {
            py::gil_scoped_release release;
            t = run_suite(specs);
        }
        return py::make_tuple(emit(t, format_from_string(format), EmitOptions{include_time}), t.all_converged());
    }, py::arg("config_json"), py::arg("format") = "csv", py::arg("include_time") = true,
       "Runs a JSON suite and returns (table text, all converged).");
    m.def("verify", [](const std::string& set) {
        std::vector<CriterionResult> results;
        {
            py::gil_scoped_release release;
            results = verify(set);
        }
        py::list out;
        for (const auto& r : results) {
            py::dict d;
            d["id"] = r.id;
            d["title"] = r.title;
            d["pass"] = r.pass;
            d["details"] = r.details;
            out.append(d);
        }
        return out;
    }, py::arg("set") = "paper");
}
