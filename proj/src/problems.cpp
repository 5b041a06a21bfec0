#include "sumscale/problems.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace sumscale {
namespace {

constexpr double kSmallestNormal = std::numeric_limits<double>::min();
constexpr double kLargestFinite = std::numeric_limits<double>::max();
constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

double flushed(double v) { return std::abs(v) < kSmallestNormal ? 0.0 : v; }

// Product of u with the flush rule applied after every factor.
double flushed_product(const Vector& u) {
    double p = 1.0;
    for (Index i = 0; i < u.size(); ++i) p = flushed(p * u[i]);
    return p;
}

// out[j] = prod_{i != j} u[i], via prefix/suffix products.
Vector leave_one_products(const Vector& u) {
    const Index n = u.size();
    Vector out(n);
    double prefix = 1.0;
    for (Index j = 0; j < n; ++j) {
        out[j] = prefix;
        prefix *= u[j];
    }
    double suffix = 1.0;
    for (Index j = n - 1; j >= 0; --j) {
        out[j] *= suffix;
        suffix *= u[j];
    }
    return out;
}

void require_positive(const Vector& x, const char* what) {
    for (Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) throw InfeasiblePoint(std::string(what) + ": parameters must be positive");
    }
}

double nonzero_sum(const Vector& x, const char* what) {
    const double s = x.sum();
    if (s == 0.0) throw DegenerateInput(std::string(what) + ": parameter sum is zero");
    return s;
}

Vector sequence(Index m) { return Vector::LinSpaced(m, 1.0, static_cast<double>(m)); }

Vector append_last(const Vector& y, double last) {
    Vector x(y.size() + 1);
    x.head(y.size()) = y;
    x[y.size()] = last;
    return x;
}

void require_dim(Index n, Index minimum, const char* what) {
    if (n < minimum) {
        throw InvalidArgument(std::string(what) + ": dimension must be at least " + std::to_string(minimum));
    }
}

}  // namespace

double neg_prod_scaled(const Vector& x) {
    const double s = nonzero_sum(x, "neg_prod_scaled");
    const double p = flushed_product(x / s);
    return p == 0.0 ? 0.0 : -p;
}

Vector neg_prod_scaled_grad(const Vector& x) {
    const double s = nonzero_sum(x, "neg_prod_scaled_grad");
    const Vector u = x / s;
    const double q = u.prod();
    const Vector others = leave_one_products(u);
    return (static_cast<double>(x.size()) * q - others.array()).matrix() / s;
}

double neg_prod_loo(const Vector& y) {
    const double p = flushed_product(y) * (1.0 - y.sum());
    return p == 0.0 ? 0.0 : -p;
}

Vector neg_prod_loo_grad(const Vector& y) {
    const double p = y.prod();
    const double rest = 1.0 - y.sum();
    return (p - leave_one_products(y).array() * rest).matrix();
}

double nll(const Vector& y) {
    const double s = y.sum();
    if ((y.array() <= 10.0 * kSmallestNormal).any() || s > 1.0 - kEpsilon) return kLargestFinite;
    return -y.array().log().sum() - std::log(1.0 - s);
}

Vector nll_grad(const Vector& y) {
    const double s = y.sum();
    if ((y.array() <= 0.0).any() || !(s < 1.0)) {
        throw InfeasiblePoint("nll_grad: point outside the open simplex interior");
    }
    return (-y.array().inverse() + 1.0 / (1.0 - s)).matrix();
}

double enll(const Vector& lx) {
    const Vector x = lx.array().exp().matrix();
    const double s = x.sum();
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    return -(x / s).array().log().sum();
}

Vector enll_grad(const Vector& lx) {
    const Vector x = lx.array().exp().matrix();
    const double s = x.sum();
    const double n = static_cast<double>(x.size());
    return ((n / s - x.array().inverse()) * x.array()).matrix();
}

double xnll(const Vector& lx) {
    const Vector x = lx.array().exp().matrix();
    const double xn = 1.0 - x.sum();
    if (xn < kXnllMinLast) return kXnllPlateau;
    return -lx.sum() - std::log(xn);
}

Vector xnll_grad(const Vector& lx) {
    const Vector x = lx.array().exp().matrix();
    const double xn = 1.0 - x.sum();
    return ((-x.array().inverse() + 1.0 / xn) * x.array()).matrix();
}

double nllrv(const Vector& x) {
    require_positive(x, "nllrv");
    return -x.array().log().sum();
}

Vector nllrv_grad(const Vector& x) {
    require_positive(x, "nllrv_grad");
    return (-x.array().inverse()).matrix();
}

double nll_scaled(const Vector& x) {
    require_positive(x, "nll_scaled");
    const double s = x.sum();
    return -(x / s).array().log().sum();
}

Vector nll_scaled_grad(const Vector& x) {
    require_positive(x, "nll_scaled_grad");
    const double n = static_cast<double>(x.size());
    return (-x.array().inverse() + n / x.sum()).matrix();
}

SymmetricMatrix moler_matrix(Index n) {
    if (n < 1) throw InvalidArgument("moler_matrix: order must be positive");
    SymmetricMatrix a(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < i; ++j) a.set(i, j, static_cast<double>(j + 1) - 2.0);
        a.set(i, i, static_cast<double>(i + 1));
    }
    return a;
}

double rayleigh_quotient(const Vector& x, const SymmetricMatrix& a) {
    const double xx = x.squaredNorm();
    if (xx == 0.0) throw DegenerateInput("rayleigh_quotient: zero vector");
    return a.quadratic_form(x) / xx;
}

double rayleigh_quotient(const Vector& x, const SymmetricMatrix& a, const SymmetricMatrix& b) {
    const double xbx = b.quadratic_form(x);
    if (xbx == 0.0) throw DegenerateInput("rayleigh_quotient: x'Bx is zero");
    return a.quadratic_form(x) / xbx;
}

Vector rq_grad(const Vector& x, const SymmetricMatrix& a) {
    const double xx = x.squaredNorm();
    if (xx == 0.0) throw DegenerateInput("rq_grad: zero vector");
    const Vector ax = a.multiply(x);
    const double r = x.dot(ax) / xx;
    return 2.0 * (ax - r * x) / xx;
}

double rosbkext(const Vector& p) {
    require_dim(p.size(), 2, "rosbkext");
    const Index n = p.size();
    const auto head = p.head(n - 1).array();
    const auto tail = p.tail(n - 1).array();
    return (100.0 * (head.square() - tail).square() + (head - 1.0).square()).sum();
}

Vector rosbkext_grad(const Vector& p) {
    require_dim(p.size(), 2, "rosbkext_grad");
    const Index n = p.size();
    Vector g = Vector::Zero(n);
    for (Index i = 0; i + 1 < n; ++i) {
        const double r = p[i] * p[i] - p[i + 1];
        g[i] += 400.0 * r * p[i] + 2.0 * (p[i] - 1.0);
        g[i + 1] -= 200.0 * r;
    }
    return g;
}

double heq(const Vector& x) { return 1.0 - x.squaredNorm(); }

double weighted_ssq_scaled(const Vector& x) {
    const double s = nonzero_sum(x, "weighted_ssq_scaled");
    const Vector u = x / s;
    return (sequence(x.size()).array() * u.array().square()).sum();
}

Vector weighted_ssq_scaled_grad(const Vector& x) {
    const double s = nonzero_sum(x, "weighted_ssq_scaled_grad");
    const Vector u = x / s;
    const Vector w = sequence(x.size());
    const double f = (w.array() * u.array().square()).sum();
    return (2.0 / s) * (w.array() * u.array() - f).matrix();
}

double weighted_ssq_raw(const Vector& x) { return (sequence(x.size()).array() * x.array().square()).sum(); }

Vector weighted_ssq_raw_grad(const Vector& x) { return 2.0 * (sequence(x.size()).array() * x.array()).matrix(); }

Vector multinomial_start(Index m, Index n) {
    return sequence(m) / (static_cast<double>(n) * static_cast<double>(n));
}

namespace {

double multinomial_optimum(Index n) {
    const double nd = static_cast<double>(n);
    return nd * std::log(nd);
}

Vector uniform_point(Index n) { return Vector::Constant(n, 1.0 / static_cast<double>(n)); }

Vector loo_to_raw(const Vector& y) { return append_last(y, 1.0 - y.sum()); }

Vector log_loo_to_raw(const Vector& lx) {
    const Vector x = lx.array().exp().matrix();
    return append_last(x, 1.0 - x.sum());
}

}  // namespace

Problem make_pr0(Index n) {
    require_dim(n, 1, "pr0");
    Problem p;
    p.name = "pr0";
    p.dim = n;
    p.objective = neg_prod_scaled;
    p.gradient = neg_prod_scaled_grad;
    p.known_solution = uniform_point(n);
    p.known_parameters = uniform_point(n);
    p.known_value = neg_prod_scaled(uniform_point(n));
    p.default_start = multinomial_start(n, n);
    p.canonical = CanonicalMode::sum_scale;
    return p;
}

Problem make_pr1(Index n) {
    require_dim(n, 2, "pr1");
    Problem p;
    p.name = "pr1";
    p.dim = n - 1;
    p.objective = neg_prod_loo;
    p.gradient = neg_prod_loo_grad;
    p.known_solution = uniform_point(n);
    p.known_parameters = Vector::Constant(n - 1, 1.0 / static_cast<double>(n));
    p.known_value = neg_prod_loo(*p.known_parameters);
    p.default_start = multinomial_start(n - 1, n);
    p.to_raw = loo_to_raw;
    p.canonical = CanonicalMode::sum_scale;
    return p;
}

Problem make_nll(Index n) {
    require_dim(n, 2, "nll");
    Problem p;
    p.name = "nll";
    p.dim = n - 1;
    p.objective = nll;
    p.gradient = nll_grad;
    p.known_solution = uniform_point(n);
    p.known_parameters = Vector::Constant(n - 1, 1.0 / static_cast<double>(n));
    p.known_value = multinomial_optimum(n);
    p.default_start = multinomial_start(n - 1, n);
    p.to_raw = loo_to_raw;
    p.canonical = CanonicalMode::sum_scale;
    return p;
}

Problem make_enll(Index n) {
    require_dim(n, 1, "enll");
    Problem p;
    p.name = "enll";
    p.dim = n;
    p.objective = enll;
    p.gradient = enll_grad;
    p.known_solution = uniform_point(n);
    p.known_parameters = Vector::Zero(n);
    p.known_value = multinomial_optimum(n);
    p.default_start = multinomial_start(n, n).array().log().matrix();
    p.to_raw = [](const Vector& lx) -> Vector { return lx.array().exp().matrix(); };
    p.canonical = CanonicalMode::sum_scale;
    return p;
}

Problem make_xnll(Index n) {
    require_dim(n, 2, "xnll");
    Problem p;
    p.name = "xnll";
    p.dim = n - 1;
    p.objective = xnll;
    p.gradient = xnll_grad;
    p.known_solution = uniform_point(n);
    p.known_parameters = Vector::Constant(n - 1, std::log(1.0 / static_cast<double>(n)));
    p.known_value = multinomial_optimum(n);
    p.default_start = multinomial_start(n - 1, n).array().log().matrix();
    p.to_raw = log_loo_to_raw;
    p.canonical = CanonicalMode::sum_scale;
    return p;
}

Problem make_nllrv(Index n) {
    require_dim(n, 1, "nllrv");
    Problem p;
    p.name = "nllrv";
    p.dim = n;
    p.objective = nllrv;
    p.gradient = nllrv_grad;
    p.known_solution = uniform_point(n);
    p.known_parameters = uniform_point(n);
    p.known_value = multinomial_optimum(n);
    p.default_start = multinomial_start(n, n);
    p.canonical = CanonicalMode::sum_scale;
    return p;
}

Problem make_nll_scaled(Index n) {
    Problem p = make_nllrv(n);
    p.name = "nll-scaled";
    p.objective = nll_scaled;
    p.gradient = nll_scaled_grad;
    return p;
}

Problem make_rayleigh(const std::string& name, const SymmetricMatrix& a) {
    require_dim(a.order(), 1, "rayleigh");
    Problem p;
    p.name = name;
    p.dim = a.order();
    p.objective = [a](const Vector& x) { return rayleigh_quotient(x, a); };
    p.gradient = [a](const Vector& x) { return rq_grad(x, a); };
    p.default_start = Vector::Ones(a.order()).normalized();
    p.canonical = CanonicalMode::sphere_signed;
    return p;
}

Problem make_moler_rq_max(Index n) { return make_rayleigh("rq-moler-max", moler_matrix(n).negated()); }

Problem make_moler_rq_min(Index n) { return make_rayleigh("rq-moler-min", moler_matrix(n)); }

Problem make_rosbkext_ball(Index n) {
    require_dim(n, 2, "rosbkext-ball");
    Problem p;
    p.name = "rosbkext-ball";
    p.dim = n;
    p.objective = rosbkext;
    p.gradient = rosbkext_grad;
    p.default_start = sequence(n) / 10.0;
    p.canonical = CanonicalMode::sphere_signed;
    return p;
}

Problem make_rhelp_ssq(Index n, bool scaled) {
    require_dim(n, 1, "rhelp-ssq");
    Problem p;
    p.name = scaled ? "rhelp-ssq-scaled" : "rhelp-ssq";
    p.dim = n;
    if (scaled) {
        p.objective = weighted_ssq_scaled;
        p.gradient = weighted_ssq_scaled_grad;
    } else {
        p.objective = weighted_ssq_raw;
        p.gradient = weighted_ssq_raw_grad;
    }
    // Minimizer of sum(i * x_i^2) on sum(x) = 1 is x_i proportional to 1/i.
    const Vector inv = sequence(n).array().inverse().matrix();
    const double harmonic = inv.sum();
    p.known_solution = inv / harmonic;
    p.known_parameters = p.known_solution;
    p.known_value = 1.0 / harmonic;
    p.default_start = multinomial_start(n, n);
    p.canonical = CanonicalMode::sum_scale;
    return p;
}

Problem make_quadratic(const std::vector<double>& diag) {
    const Vector d = Eigen::Map<const Vector>(diag.data(), static_cast<Index>(diag.size()));
    require_dim(d.size(), 1, "quadratic");
    Problem p;
    p.name = "quadratic";
    p.dim = d.size();
    p.objective = [d](const Vector& x) { return (d.array() * x.array().square()).sum(); };
    p.gradient = [d](const Vector& x) -> Vector { return 2.0 * (d.array() * x.array()).matrix(); };
    p.known_solution = Vector::Zero(d.size());
    p.known_parameters = Vector::Zero(d.size());
    p.known_value = 0.0;
    p.default_start = Vector::Ones(d.size());
    return p;
}

Problem make_problem(const std::string& name, Index n) {
    if (name == "pr0") return make_pr0(n);
    if (name == "pr1") return make_pr1(n);
    if (name == "nll") return make_nll(n);
    if (name == "enll") return make_enll(n);
    if (name == "xnll") return make_xnll(n);
    if (name == "nllrv") return make_nllrv(n);
    if (name == "nll-scaled") return make_nll_scaled(n);
    if (name == "rq-moler-max") return make_moler_rq_max(n);
    if (name == "rq-moler-min") return make_moler_rq_min(n);
    if (name == "rosbkext-ball") return make_rosbkext_ball(n);
    if (name == "rhelp-ssq") return make_rhelp_ssq(n, false);
    if (name == "rhelp-ssq-scaled") return make_rhelp_ssq(n, true);
    if (name == "quadratic") {
        require_dim(n, 1, "quadratic");
        std::vector<double> diag(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = static_cast<double>(i + 1);
        return make_quadratic(diag);
    }
    throw InvalidArgument("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() {
    return {"pr0",          "pr1",          "nll",           "enll",      "xnll",
            "nllrv",        "nll-scaled",   "rq-moler-max",  "rq-moler-min",
            "rosbkext-ball", "rhelp-ssq",   "rhelp-ssq-scaled", "quadratic"};
}

}  // namespace sumscale
