#include "sumscale/harness.hpp"
#include "sumscale/oracle.hpp"
#include "sumscale/problems.hpp"
#include "sumscale/projections.hpp"
#include "sumscale/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

namespace sumscale {
namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Records one sub-check and folds it into the criterion verdict.
class Checker {
public:
    Checker(int id, std::string title, bool uses_simplex = false) {
        result_.id = id;
        result_.title = std::move(title);
        result_.uses_simplex = uses_simplex;
        result_.pass = true;
    }

    bool check(bool ok, const std::string& what) {
        result_.details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        if (!ok) result_.pass = false;
        return ok;
    }

    bool near(double measured, double expected, double tol, const std::string& what) {
        const bool ok = std::isfinite(measured) && std::abs(measured - expected) <= tol;
        return check(ok, what + ": measured " + num(measured) + ", expected " + num(expected) + " (tol " + num(tol) + ")");
    }

    bool at_most(double measured, double limit, const std::string& what) {
        const bool ok = std::isfinite(measured) && measured <= limit;
        return check(ok, what + ": " + num(measured) + " <= " + num(limit));
    }

    void note(const std::string& text) { result_.details.push_back("     " + text); }
    void set_pass(bool pass) { result_.pass = pass; }
    CriterionResult take() { return std::move(result_); }

private:
    CriterionResult result_;
};

struct Env {
    Projection simplex;
    RunContext context;
};

Env make_env(const VerifyOptions& options) {
    Env env;
    env.simplex = options.simplex_override ? *options.simplex_override : Projection{"simplex", project_simplex};
    const Projection simplex = env.simplex;
    env.context.resolve_projection = [simplex](const std::string& name, const Bounds* b) {
        if (name == "simplex") return simplex;
        return projection_from_name(name, b);
    };
    return env;
}

RunSpec spec_of(const std::string& problem, Index n, const std::string& method, const std::string& reform = "identity") {
    RunSpec s;
    s.problem = problem;
    s.n = n;
    s.method = method;
    s.reformulation = reform;
    s.compute_kkt = false;
    return s;
}

std::string label(const Row& r) {
    std::string s = r.problem + " n=" + std::to_string(r.n) + " " + r.method;
    if (r.reformulation != "identity") s += " [" + r.reformulation + "]";
    if (!r.bounds.empty()) s += " bounds " + r.bounds;
    return s;
}

double n_log_n(Index n) { return static_cast<double>(n) * std::log(static_cast<double>(n)); }

Vector uniform_vector(SplitMix64& rng, Index n, double lo, double hi) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
    return v;
}

// ---- criteria ----------------------------------------------------------

void multinomial_golden(Checker& c, const Env& env) {
    bool all = true;
    for (Index n : {Index{5}, Index{100}, Index{1000}}) {
        const double expected = n_log_n(n);
        const double err_tol = n <= 100 ? 1e-5 : 1e-4;
        std::vector<RunSpec> specs;
        for (const char* m : {"vm", "cg"}) {
            RunSpec s = spec_of("nll", n, m);
            s.bounds = std::make_pair(0.0, 1.0);
            specs.push_back(s);
        }
        RunSpec s = spec_of("nllrv", n, "spg");
        s.projection = "simplex";
        specs.push_back(s);
        int good = 0;
        for (const RunSpec& spec : specs) {
            const Row r = run_contained(spec, env.context);
            const bool ok = std::isfinite(r.value) && std::abs(r.value - expected) <= 1e-4 && r.canonical_error &&
                            *r.canonical_error <= err_tol;
            good += ok ? 1 : 0;
            c.note(std::string(ok ? "reached " : "missed  ") + label(r) + ": value " + num(r.value) + " vs " +
                   num(expected) + ", canonical error " + (r.canonical_error ? num(*r.canonical_error) : "NA") +
                   " (limit " + num(err_tol) + ")");
        }
        all = c.check(good >= 2, "n=" + std::to_string(n) + ": " + std::to_string(good) + " of 3 methods") && all;
    }
    c.set_pass(all);
}

void product_form(Checker& c, const Env& env) {
    for (const char* p : {"pr0", "pr1"}) {
        for (const char* m : {"nm", "vm"}) {
            const Row r = run_contained(spec_of(p, 5, m), env.context);
            c.near(r.value, -0.00032, 1e-6, label(r) + " value");
            c.at_most(r.canonical_error.value_or(NAN), 1e-4, label(r) + " canonical error");
        }
    }
}

void log_transform(Checker& c, const Env& env) {
    for (const char* m : {"vm", "cg"}) {
        RunSpec s = spec_of("enll", 100, m);
        s.compute_kkt = true;
        const Row r = run_contained(s, env.context);
        c.near(r.value, n_log_n(100), 1e-6, label(r) + " value");
        c.at_most(r.canonical_error.value_or(NAN), 1e-7, label(r) + " canonical error");
        c.check(r.kkt1 && *r.kkt1, label(r) + " kkt1 TRUE");
        c.check(r.kkt2 && !*r.kkt2, label(r) + " kkt2 FALSE");
    }
}

void masked_scaled(Checker& c, const Env& env) {
    for (Index n : {Index{100}, Index{1000}}) {
        const Row r = run_contained(spec_of("nll-scaled", n, "cg", "mask:last=0.02"), env.context);
        c.near(r.value, n_log_n(n), 1e-4, label(r) + " value");
        c.at_most(r.canonical_error.value_or(NAN), 1e-6, label(r) + " canonical error");
    }
}

void rayleigh(Checker& c, const Env& env) {
    const EigenDecomposition eig = jacobi_eigen(moler_matrix(10));
    const double oracle_max = eig.values.back();
    const double oracle_min = eig.values.front();

    RunSpec smax = spec_of("rq-moler-max", 10, "spg");
    smax.projection = "sphere-signed";
    const Row rmax = run_contained(smax, env.context);
    c.near(-rmax.value, 31.58981, 1e-4, "largest eigenvalue");
    c.near(-rmax.value, oracle_max, 1e-4, "largest eigenvalue vs Jacobi");
    if (rmax.raw.size() == 10) {
        c.at_most(eigvec_error(rmax.raw, eig.vectors.back()), 1e-4, "largest eigenvector error vs Jacobi");
    } else {
        c.check(false, "largest eigenvector missing: " + rmax.status);
    }

    RunSpec smin = spec_of("rq-moler-min", 10, "spg");
    smin.projection = "sphere-signed";
    const Row rmin = run_contained(smin, env.context);
    c.near(rmin.value, 8.582807e-06, 1e-8, "smallest eigenvalue");
    c.near(rmin.value, oracle_min, 1e-8, "smallest eigenvalue vs Jacobi");
    if (rmin.raw.size() == 10) {
        c.at_most(eigvec_error(rmin.raw, eig.vectors.front()), 1e-4, "smallest eigenvector error vs Jacobi");
    } else {
        c.check(false, "smallest eigenvector missing: " + rmin.status);
    }
}

void rosenbrock(Checker& c, const Env& env) {
    const double target = 2.467509;

    RunSpec sa = spec_of("rosbkext-ball", 6, "spg");
    sa.projection = "sphere-signed";
    const Row ra = run_contained(sa, env.context);
    c.near(ra.value, target, 1e-5, "(a) spg signed projection value");
    Vector expected(6);
    expected << 0.7480, 0.56499, 0.32738, 0.11654, 0.02302, 0.00052;
    const double perr = ra.raw.size() == 6 ? (ra.raw - expected).cwiseAbs().maxCoeff() : NAN;
    c.at_most(perr, 1e-3, "(a) cartesian parameter deviation");

    RunSpec sb = spec_of("rosbkext-ball", 6, "spg");
    sb.projection = "sphere";
    const Row rb = run_contained(sb, env.context);
    c.check(rb.conv != convergence::converged, "(b) spg unsigned projection terminates unsuccessfully: conv " +
                                                   std::to_string(rb.conv) + " (" + rb.status + ")");
    c.near(rb.value, 46.34, 5e-3, "(b) spg unsigned projection terminal value");

    for (const char* m : {"vm", "cg"}) {
        for (const char* reform : {"spherical", "spherical-bounded"}) {
            RunSpec s = spec_of("rosbkext-ball", 6, m, reform);
            s.start.kind = StartSpec::Kind::explicit_vector;
            s.start.values = Vector::Ones(5);
            const Row r = run_contained(s, env.context);
            c.near(r.value, target, 1e-5, std::string("(c) ") + label(r));
        }
    }
}

void rhelp(Checker& c, const Env& env) {
    Vector expected(3);
    expected << 0.5454545, 0.2727273, 0.1818182;
    const double lagrangian = 6.0 / 11.0;  // 1 / (1 + 1/2 + 1/3)

    RunSpec s = spec_of("rhelp-ssq", 3, "spg");
    s.projection = "simplex";
    const Row r = run_contained(s, env.context);
    const double perr = r.raw.size() == 3 ? (r.raw - expected).cwiseAbs().maxCoeff() : NAN;
    c.at_most(perr, 1e-5, "spg+simplex parameter deviation");
    c.near(r.raw.size() == 3 ? weighted_ssq_scaled(r.raw) : NAN, 0.5454545, 1e-6, "spg+simplex scaled objective");

    const QpSolution qp = solve_eq_qp(SymmetricMatrix::diagonal({1.0, 2.0, 3.0}), Vector::Zero(3),
                                      Eigen::MatrixXd::Ones(3, 1), Vector::Ones(1));
    c.at_most((qp.solution - expected).cwiseAbs().maxCoeff(), 1e-5, "QP solution deviation");
    c.near(weighted_ssq_scaled(qp.solution), 0.5454545, 1e-6, "QP scaled objective");
    c.near(qp.multipliers[0], lagrangian, 1e-9, "QP multiplier (exact 6/11, printed 0.5454545)");
}

void underflow(Checker& c) {
    const double v143 = neg_prod_scaled(Vector::Ones(143));
    const double v140 = neg_prod_scaled(Vector::Ones(140));
    c.check(v143 == 0.0, "neg_prod_scaled(ones(143)) == 0: " + num(v143));
    c.check(v140 < 0.0, "neg_prod_scaled(ones(140)) < 0: " + num(v140));
}

struct GradientCase {
    std::string name;
    Objective f;
    Gradient g;
    Index dim;
    double lo;
    double hi;
};

std::vector<GradientCase> gradient_cases() {
    std::vector<GradientCase> cases;
    auto add = [&](const std::string& name, const Objective& f, const Gradient& g, Index dim, double lo, double hi) {
        cases.push_back({name, f, g, dim, lo, hi});
    };
    add("neg_prod_scaled", neg_prod_scaled, neg_prod_scaled_grad, 5, 0.5, 1.5);
    add("neg_prod_loo", neg_prod_loo, neg_prod_loo_grad, 4, 0.05, 0.2);
    add("nll", nll, nll_grad, 4, 0.05, 0.2);
    add("enll", enll, enll_grad, 5, -1.0, 1.0);
    add("xnll", xnll, xnll_grad, 4, -3.0, -2.0);
    add("nllrv", nllrv, nllrv_grad, 5, 0.1, 1.0);
    add("nll_scaled", nll_scaled, nll_scaled_grad, 5, 0.1, 1.0);
    const SymmetricMatrix moler = moler_matrix(10);
    add("rayleigh_quotient", [moler](const Vector& x) { return rayleigh_quotient(x, moler); },
        [moler](const Vector& x) { return rq_grad(x, moler); }, 10, -1.0, 1.0);
    add("rosbkext", rosbkext, rosbkext_grad, 6, -1.0, 1.0);
    add("weighted_ssq_scaled", weighted_ssq_scaled, weighted_ssq_scaled_grad, 3, 0.1, 1.0);
    add("weighted_ssq_raw", weighted_ssq_raw, weighted_ssq_raw_grad, 3, -1.0, 1.0);

    auto add_reform = [&](const Problem& base, const std::string& reform, double lo, double hi) {
        const Problem p = reformulate(base, reformulation_from_name(reform, base.dim));
        add(base.name + " through " + reform, p.objective, p.gradient, p.dim, lo, hi);
    };
    add_reform(make_nll_scaled(5), "loo", 0.05, 0.2);
    add_reform(make_nll_scaled(5), "log", -1.0, 1.0);
    add_reform(make_nll_scaled(5), "log-loo", -3.0, -2.0);
    add_reform(make_rhelp_ssq(3, false), "scale-embed", 0.1, 1.0);
    add_reform(make_rosbkext_ball(6), "spherical", 0.1, 3.0);
    add_reform(make_nll_scaled(5), "mask:last=0.02", 0.1, 1.0);
    add_reform(make_nll_scaled(5), "log+mask:0=0", -1.0, 1.0);
    return cases;
}

void gradient_suite(Checker& c) {
    SplitMix64 rng(20240917);
    for (const GradientCase& gc : gradient_cases()) {
        double worst = 0.0;
        std::string diag;
        bool ok = true;
        for (int k = 0; k < 20; ++k) {
            const Vector x = uniform_vector(rng, gc.dim, gc.lo, gc.hi);
            const GradientCheck chk = check_gradient(gc.f, gc.g, x, 1e-5);
            worst = std::max(worst, chk.max_rel_diff);
            if (!chk.pass) {
                ok = false;
                diag = chk.diagnostic;
            }
        }
        c.check(ok, gc.name + ": worst relative difference " + num(worst) + (diag.empty() ? "" : " (" + diag + ")"));
    }

    bool threw = false;
    GradientCheck nan_check;
    try {
        Vector x = Vector::Constant(3, 0.5);
        x[1] = std::nan("");
        nan_check = check_gradient(nll_scaled, nll_scaled_grad, x, 1e-5);
    } catch (...) {
        threw = true;
    }
    c.check(!threw && !nan_check.pass, "check_gradient on a NaN point reports failure without throwing");
}

void properties(Checker& c, const Env& env) {
    SplitMix64 rng(7);

    // Projection idempotence.
    const Bounds box = Bounds::uniform(6, -0.5, 0.5);
    const std::vector<Projection> projections{env.simplex, {"unit-sum", project_unit_sum},
                                              {"sphere-signed", project_sphere_signed},
                                              {"sphere", project_sphere_unsigned}, box_projection(box)};
    for (const Projection& p : projections) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Vector y = p.name == "unit-sum" ? uniform_vector(rng, 6, 0.1, 2.0) : uniform_vector(rng, 6, -2.0, 2.0);
            const Vector x = p(y);
            worst = std::max(worst, (p(x) - x).cwiseAbs().maxCoeff());
        }
        c.at_most(worst, 1e-12, p.name + " projection idempotence");
    }

    // Simplex optimality: feasibility plus the variational inequality.
    {
        double infeasible = 0.0;
        double vi = -INFINITY;
        for (int k = 0; k < 100; ++k) {
            const Vector y = uniform_vector(rng, 6, -2.0, 2.0);
            const Vector x = env.simplex(y);
            infeasible = std::max({infeasible, std::abs(x.sum() - 1.0), std::max(0.0, -x.minCoeff())});
            for (int j = 0; j < 20; ++j) {
                Vector z = uniform_vector(rng, 6, 0.0, 1.0);
                z /= z.sum();
                vi = std::max(vi, (y - x).dot(z - x));
            }
        }
        c.at_most(infeasible, 1e-12, "simplex projection feasibility");
        c.at_most(vi, 1e-12, "simplex projection optimality (y - P y)'(z - P y)");
    }

    // Scale invariance.
    {
        const SymmetricMatrix moler = moler_matrix(6);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Vector x = uniform_vector(rng, 6, 0.1, 1.0);
            for (double s : {0.5, 3.0, 100.0}) {
                auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); };
                worst = std::max(worst, rel(neg_prod_scaled(s * x), neg_prod_scaled(x)));
                worst = std::max(worst, rel(nll_scaled(s * x), nll_scaled(x)));
                worst = std::max(worst, rel(weighted_ssq_scaled(s * x), weighted_ssq_scaled(x)));
                worst = std::max(worst, rel(rayleigh_quotient(s * x, moler), rayleigh_quotient(x, moler)));
                const Vector lx = x.array().log().matrix();
                worst = std::max(worst, rel(enll((lx.array() + std::log(s)).matrix()), enll(lx)));
            }
        }
        c.at_most(worst, 1e-12, "scale invariance of scaled objectives");
    }

    // SPG feasibility and nonmonotone envelope.
    {
        SolverConfig cfg;
        struct Case {
            Problem p;
            Projection proj;
        };
        std::vector<Case> cases{{make_nllrv(50), env.simplex},
                                {make_moler_rq_max(10), {"sphere-signed", project_sphere_signed}},
                                {make_rosbkext_ball(6), {"sphere-signed", project_sphere_signed}}};
        for (const Case& k : cases) {
            try {
                const SolveReport r = spg(k.p.objective, k.p.gradient, k.proj, k.p.default_start, cfg);
                c.at_most((k.proj(r.parameters) - r.parameters).cwiseAbs().maxCoeff(), 1e-12,
                          "spg " + k.p.name + " output is a projection fixed point");
                bool envelope = true;
                double prev = INFINITY;
                const auto& h = r.history;
                for (std::size_t i = 0; i < h.size(); ++i) {
                    const std::size_t from = i + 1 >= static_cast<std::size_t>(cfg.step_memory)
                                                 ? i + 1 - static_cast<std::size_t>(cfg.step_memory)
                                                 : 0;
                    const double m = *std::max_element(h.begin() + static_cast<std::ptrdiff_t>(from),
                                                       h.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                    if (m > prev) envelope = false;
                    prev = m;
                }
                c.check(envelope, "spg " + k.p.name + " nonmonotone envelope over " + std::to_string(h.size()) +
                                      " accepted values is non-increasing");
            } catch (const std::exception& e) {
                c.check(false, "spg " + k.p.name + " threw: " + e.what());
            }
        }
    }

    // Counter honesty.
    {
        const Problem p = make_nll_scaled(8);
        SolverConfig cfg;
        for (const char* m : {"spg", "vm", "cg", "nm"}) {
            for (GradientMode gm : {GradientMode::analytic, GradientMode::central}) {
                if (std::string(m) == "nm" && gm == GradientMode::central) continue;
                long fcalls = 0;
                long gcalls = 0;
                const Objective f = [&](const Vector& x) {
                    ++fcalls;
                    return p.objective(x);
                };
                const Gradient g = [&](const Vector& x) {
                    ++gcalls;
                    return p.gradient(x);
                };
                cfg.gradient_mode = gm;
                SolveReport r;
                const std::string mode = to_string(gm);
                if (std::string(m) == "spg") {
                    r = spg(f, g, env.simplex, p.default_start, cfg);
                } else if (std::string(m) == "vm") {
                    r = vm(f, g, p.default_start, cfg);
                } else if (std::string(m) == "cg") {
                    r = cg(f, g, p.default_start, cfg);
                } else {
                    r = nelder_mead(f, p.default_start, cfg);
                }
                c.check(r.fevals == fcalls && r.gevals == (gm == GradientMode::analytic ? gcalls : r.gevals) &&
                            (gm == GradientMode::analytic || gcalls == 0),
                        std::string(m) + "/" + mode + " counters: fevals " + std::to_string(r.fevals) + " vs " +
                            std::to_string(fcalls) + " calls, gevals " + std::to_string(r.gevals) + " vs " +
                            std::to_string(gcalls) + " calls");
            }
        }
    }

    // QP KKT residual.
    {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const Index n = 6;
            Eigen::MatrixXd m(n, n);
            for (Index i = 0; i < n; ++i) m.col(i) = uniform_vector(rng, n, -1.0, 1.0);
            const Eigen::MatrixXd spd = m * m.transpose() + Eigen::MatrixXd::Identity(n, n);
            std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
            for (Index i = 0; i < n; ++i) {
                for (Index j = 0; j < n; ++j) rows[static_cast<std::size_t>(i)].push_back(spd(i, j));
            }
            Eigen::MatrixXd a(n, 2);
            a.col(0) = Vector::Ones(n);
            a.col(1) = uniform_vector(rng, n, -1.0, 1.0);
            const QpSolution qp =
                solve_eq_qp(SymmetricMatrix::from_rows(rows), uniform_vector(rng, n, -1.0, 1.0), a, Vector::Ones(2));
            worst = std::max(worst, qp.kkt_residual);
        }
        c.at_most(worst, 1e-10, "equality QP relative KKT residual");
    }

    // Jacobi reconstruction and trace.
    {
        double recon = 0.0;
        double trace = 0.0;
        for (Index n = 2; n <= 50; ++n) {
            const SymmetricMatrix a = moler_matrix(n);
            const EigenDecomposition eig = jacobi_eigen(a);
            Eigen::MatrixXd v(n, n);
            Vector lambda(n);
            for (Index k = 0; k < n; ++k) {
                v.col(k) = eig.vectors[static_cast<std::size_t>(k)];
                lambda[k] = eig.values[static_cast<std::size_t>(k)];
            }
            const Eigen::MatrixXd rebuilt = v * lambda.asDiagonal() * v.transpose();
            double diff = 0.0;
            for (Index i = 0; i < n; ++i) {
                for (Index j = 0; j < n; ++j) diff = std::max(diff, std::abs(rebuilt(i, j) - a(i, j)));
            }
            recon = std::max(recon, diff / a.max_abs());
            trace = std::max(trace, std::abs(lambda.sum() - a.trace()) / std::abs(a.trace()));
        }
        c.at_most(recon, 1e-9, "Jacobi reconstruction, moler(2..50), relative to max|A|");
        c.at_most(trace, 1e-9, "Jacobi trace preservation, moler(2..50), relative");
    }
}

}  // namespace

std::vector<std::string> verify_set_names() { return {"paper"}; }

std::vector<CriterionResult> verify(const std::string& set, const VerifyOptions& options) {
    if (set != "paper") throw InvalidArgument("unknown check set '" + set + "' (known: paper)");
    const Env env = make_env(options);
    struct Entry {
        int id;
        const char* title;
        bool uses_simplex;
        std::function<void(Checker&)> body;
    };
    const Entry entries[] = {
        {1, "multinomial NLL golden values (two of vm, cg, spg+simplex)", true,
         [&](Checker& c) { multinomial_golden(c, env); }},
        {2, "product-form problems pr0/pr1 with nm and vm", false, [&](Checker& c) { product_form(c, env); }},
        {3, "log-transform enll with vm and cg", false, [&](Checker& c) { log_transform(c, env); }},
        {4, "masked scaled NLL with cg, last parameter fixed at 0.02", false,
         [&](Checker& c) { masked_scaled(c, env); }},
        {5, "Rayleigh quotient extremes of moler(10) by spg with the signed sphere projection", false,
         [&](Checker& c) { rayleigh(c, env); }},
        {6, "extended Rosenbrock on the unit sphere", false, [&](Checker& c) { rosenbrock(c, env); }},
        {7, "R-help weighted sum of squares: spg+simplex and equality QP", true, [&](Checker& c) { rhelp(c, env); }},
        {8, "underflow of the scaled product", false, [](Checker& c) { underflow(c); }},
        {9, "analytic gradients agree with central differences", false, [](Checker& c) { gradient_suite(c); }},
        {10, "property suites", true, [&](Checker& c) { properties(c, env); }},
    };
    std::vector<CriterionResult> out;
    for (const Entry& e : entries) {
        Checker c(e.id, e.title, e.uses_simplex);
        try {
            e.body(c);
        } catch (const std::exception& ex) {
            c.check(false, std::string("aborted: ") + ex.what());
        }
        out.push_back(c.take());
    }
    return out;
}

void print_verify_report(const std::vector<CriterionResult>& results, std::ostream& out, bool with_details) {
    std::size_t passed = 0;
    for (const auto& r : results) {
        out << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << '\n';
        if (with_details) {
            for (const auto& d : r.details) out << "    " << d << '\n';
        }
        passed += r.pass ? 1 : 0;
    }
    out << passed << "/" << results.size() << " criteria passed\n";
}

}  // namespace sumscale
