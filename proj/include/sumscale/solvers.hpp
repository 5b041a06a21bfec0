#ifndef SUMSCALE_SOLVERS_HPP
#define SUMSCALE_SOLVERS_HPP

#include "sumscale/projections.hpp"
#include "sumscale/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sumscale {

enum class Method { spg, vm, cg, nelder_mead };
enum class GradientMode { analytic, forward, central };

std::string to_string(Method method);
std::string to_string(GradientMode mode);
Method method_from_string(const std::string& name);
GradientMode gradient_mode_from_string(const std::string& name);

struct SolverConfig {
    Method method = Method::spg;
    int max_iterations = 1500;
    long max_function_evals = 10000;
    GradientMode gradient_mode = GradientMode::analytic;
    double f_tolerance = 1e-12;  // relative change in f (vm, cg, nelder-mead)
    double g_tolerance = 1e-9;   // projected-gradient inf-norm, relative to 1 + abs(f)
    int step_memory = 10;        // SPG nonmonotone window
    double bb_step_min = 1e-10;
    double bb_step_max = 1e10;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument when a tolerance or the memory is out of range.
    void validate() const;
};

namespace convergence {
inline constexpr int converged = 0;
inline constexpr int limit_reached = 1;
inline constexpr int line_search_failure = 2;
inline constexpr int not_run = 9999;
}  // namespace convergence

struct SolveReport {
    Vector parameters;
    double value = 0.0;
    long fevals = 0;
    long gevals = 0;
    long hevals = 0;
    int iterations = 0;
    int convergence_code = convergence::not_run;
    std::optional<bool> kkt1;
    std::optional<bool> kkt2;
    double wall_time_seconds = 0.0;
    std::string message;
    std::vector<double> history;  // spg: value at each accepted iterate, start included
};

/// Spectral projected gradient with a nonmonotone (max of the last M values)
/// backtracking search. Every trial point is passed through `project`.
///
/// Objective values that are non-finite, equal to the largest finite double,
/// or raised as InfeasiblePoint/DegenerateInput count as rejected trial
/// points. Throws NonFiniteValue if the projected start is rejected.
/// An empty `gradient` (or a non-analytic gradient mode) uses finite
/// differences, whose probes are counted in `fevals`.
SolveReport spg(const Objective& objective, const Gradient& gradient, const Projection& project,
                const Vector& x0, const SolverConfig& config);

/// BFGS on the inverse Hessian with a strong-Wolfe search. With bounds, trial
/// points are clamped to the box and gradient components pushing outward at
/// active bounds are zeroed.
SolveReport vm(const Objective& objective, const Gradient& gradient, const Vector& x0, const SolverConfig& config,
               const std::optional<Bounds>& bounds = std::nullopt);

/// Polak-Ribiere-plus conjugate gradient, restarting on non-descent and every
/// dim iterations. Same bounds treatment as vm.
SolveReport cg(const Objective& objective, const Gradient& gradient, const Vector& x0, const SolverConfig& config,
               const std::optional<Bounds>& bounds = std::nullopt);

/// Nelder-Mead with coefficients 1, 2, 0.5, 0.5 and a deterministic axis simplex.
SolveReport nelder_mead(const Objective& objective, const Vector& x0, const SolverConfig& config);

/// Forward step 1e-7 * (1 + |x_i|), central step 1e-6 * (1 + |x_i|). Probes
/// ignore bounds. Throws NonFiniteValue if a probe value is not finite.
Vector numerical_gradient(const Objective& objective, const Vector& x, GradientMode mode);

struct GradientCheck {
    bool pass = false;
    double max_rel_diff = 0.0;
    std::string diagnostic;
};

/// Compares `gradient` with central differences; never throws.
GradientCheck check_gradient(const Objective& objective, const Gradient& gradient, const Vector& x, double tol);

struct KktResult {
    bool kkt1 = false;
    bool kkt2 = false;
    double projected_gradient_norm = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
};

/// kkt1: inf-norm of the projected gradient <= 1e-5 * (1 + |f|).
/// kkt2: the Hessian on free coordinates is positive definite relative to
/// its scale, smallest eigenvalue > 1e-5 * max(1, |largest|).
KktResult kkt_check(const Objective& objective, const Vector& x, const Gradient& gradient = {},
                    const std::optional<Bounds>& bounds = std::nullopt);

struct QpSolution {
    Vector solution;
    Vector multipliers;
    double objective_value = 0.0;  // 0.5 x'Dx - d'x
    double problem_value = 0.0;    // x'Dx
    double kkt_residual = 0.0;     // relative residual of the KKT system
};

/// min 0.5 x'Dx - d'x subject to A'x = b, through the KKT linear system.
/// A is n x m. Multipliers satisfy Dx - d = A * multipliers.
QpSolution solve_eq_qp(const SymmetricMatrix& d_matrix, const Vector& d, const Eigen::MatrixXd& a, const Vector& b);

}  // namespace sumscale

#endif  // SUMSCALE_SOLVERS_HPP
