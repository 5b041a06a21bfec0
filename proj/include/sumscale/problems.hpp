#ifndef SUMSCALE_PROBLEMS_HPP
#define SUMSCALE_PROBLEMS_HPP

#include "sumscale/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sumscale {

// Safeguard constants used by the multinomial objectives.
inline constexpr double kXnllMinLast = 1e-8;
inline constexpr double kXnllPlateau = 1e+25;

/// A named objective over its own parameter vector.
///
/// `to_raw` carries the problem's parameters into the full raw space the
/// known solution lives in (e.g. the leave-one-out forms append the implied
/// last coordinate). An empty `to_raw` means the two spaces coincide.
struct Problem {
    std::string name;
    Index dim = 0;
    Objective objective;
    Gradient gradient;  // empty when no analytic gradient exists
    std::optional<Bounds> bounds;
    std::optional<Vector> known_solution;    // raw space
    std::optional<Vector> known_parameters;  // the problem's own space
    std::optional<double> known_value;
    Vector default_start;
    VectorMap to_raw;
    CanonicalMode canonical = CanonicalMode::none;

    bool has_gradient() const { return static_cast<bool>(gradient); }
    Vector raw(const Vector& params) const { return to_raw ? to_raw(params) : params; }
};

// ---- objectives ---------------------------------------------------------

/// -prod(x / sum(x)). Products falling below the smallest normal double are
/// flushed to zero, so the value underflows once n^-n leaves the normal range.
double neg_prod_scaled(const Vector& x);
Vector neg_prod_scaled_grad(const Vector& x);

/// -prod(y) * (1 - sum(y)), with the same flush-to-zero rule.
double neg_prod_loo(const Vector& y);
Vector neg_prod_loo_grad(const Vector& y);

/// Leave-one-out multinomial NLL. Returns the largest finite double when y
/// leaves the open simplex interior.
double nll(const Vector& y);
Vector nll_grad(const Vector& y);

double enll(const Vector& lx);
Vector enll_grad(const Vector& lx);

double xnll(const Vector& lx);
Vector xnll_grad(const Vector& lx);

double nllrv(const Vector& x);
Vector nllrv_grad(const Vector& x);

/// -sum(log(x / sum(x))) on raw positive x.
double nll_scaled(const Vector& x);
Vector nll_scaled_grad(const Vector& x);

SymmetricMatrix moler_matrix(Index n);

double rayleigh_quotient(const Vector& x, const SymmetricMatrix& a);
double rayleigh_quotient(const Vector& x, const SymmetricMatrix& a, const SymmetricMatrix& b);
Vector rq_grad(const Vector& x, const SymmetricMatrix& a);

double rosbkext(const Vector& x);
Vector rosbkext_grad(const Vector& x);

double heq(const Vector& x);

double weighted_ssq_scaled(const Vector& x);
Vector weighted_ssq_scaled_grad(const Vector& x);
double weighted_ssq_raw(const Vector& x);
Vector weighted_ssq_raw_grad(const Vector& x);

// ---- problem builders ---------------------------------------------------

/// (1, 2, ..., m) / n^2.
Vector multinomial_start(Index m, Index n);

Problem make_pr0(Index n);
Problem make_pr1(Index n);
Problem make_nll(Index n);
Problem make_enll(Index n);
Problem make_xnll(Index n);
Problem make_nllrv(Index n);
Problem make_nll_scaled(Index n);
Problem make_rayleigh(const std::string& name, const SymmetricMatrix& a);
Problem make_moler_rq_max(Index n);
Problem make_moler_rq_min(Index n);
Problem make_rosbkext_ball(Index n);
Problem make_rhelp_ssq(Index n, bool scaled);
Problem make_quadratic(const std::vector<double>& diag);

/// Resolves a problem by its harness name; throws InvalidArgument on unknown names.
Problem make_problem(const std::string& name, Index n);
std::vector<std::string> problem_names();

}  // namespace sumscale

#endif  // SUMSCALE_PROBLEMS_HPP
