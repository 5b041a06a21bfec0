#include "sumscale/solvers.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

namespace sumscale {

std::string to_string(Method method) {
    switch (method) {
        case Method::spg:
            return "spg";
        case Method::vm:
            return "vm";
        case Method::cg:
            return "cg";
        case Method::nelder_mead:
            return "nm";
    }
    return "spg";
}

std::string to_string(GradientMode mode) {
    switch (mode) {
        case GradientMode::analytic:
            return "analytic";
        case GradientMode::forward:
            return "forward";
        case GradientMode::central:
            return "central";
    }
    return "analytic";
}

Method method_from_string(const std::string& name) {
    if (name == "spg") return Method::spg;
    if (name == "vm") return Method::vm;
    if (name == "cg") return Method::cg;
    if (name == "nm" || name == "nelder-mead") return Method::nelder_mead;
    throw InvalidArgument("unknown method '" + name + "'");
}

GradientMode gradient_mode_from_string(const std::string& name) {
    if (name == "analytic") return GradientMode::analytic;
    if (name == "forward") return GradientMode::forward;
    if (name == "central") return GradientMode::central;
    throw InvalidArgument("unknown gradient mode '" + name + "'");
}

void SolverConfig::validate() const {
    if (!(f_tolerance > 0.0) || !(g_tolerance > 0.0)) throw InvalidArgument("tolerances must be positive");
    if (step_memory < 1) throw InvalidArgument("step_memory must be at least 1");
    if (max_iterations < 0 || max_function_evals < 0) throw InvalidArgument("budgets must be non-negative");
    if (!(bb_step_min > 0.0) || !(bb_step_max >= bb_step_min)) throw InvalidArgument("bad spectral step bounds");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLargestFinite = std::numeric_limits<double>::max();

// Finite and below the largest-finite plateau used by safeguarded objectives.
bool acceptable(double f) { return std::isfinite(f) && f < kLargestFinite; }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Counting front end to one solve's objective and gradient.
class Evaluator {
public:
    Evaluator(const Objective& objective, const Gradient& gradient, GradientMode mode, long max_fevals)
        : objective_(objective), gradient_(gradient), max_fevals_(max_fevals) {
        mode_ = (mode == GradientMode::analytic && !gradient) ? GradientMode::central : mode;
    }

    // Rejected points come back as +inf.
    double value(const Vector& x) {
        ++fevals_;
        try {
            const double v = objective_(x);
            return acceptable(v) ? v : kInf;
        } catch (const InfeasiblePoint&) {
            return kInf;
        } catch (const DegenerateInput&) {
            return kInf;
        }
    }

    // Throws NonFiniteValue when no finite gradient can be formed.
    Vector gradient(const Vector& x) {
        ++gevals_;
        Vector g;
        if (mode_ == GradientMode::analytic) {
            try {
                g = gradient_(x);
            } catch (const InfeasiblePoint& e) {
                throw NonFiniteValue(std::string("gradient failed: ") + e.what());
            }
        } else {
            const Objective counted = [this](const Vector& p) {
                ++fevals_;
                try {
                    return objective_(p);
                } catch (const InfeasiblePoint&) {
                    return kInf;
                } catch (const DegenerateInput&) {
                    return kInf;
                }
            };
            g = numerical_gradient(counted, x, mode_);
        }
        if (!g.allFinite()) throw NonFiniteValue("gradient has non-finite components");
        return g;
    }

    bool exhausted() const { return fevals_ >= max_fevals_; }
    long fevals() const { return fevals_; }
    long gevals() const { return gevals_; }

private:
    const Objective& objective_;
    const Gradient& gradient_;
    GradientMode mode_;
    long max_fevals_;
    long fevals_ = 0;
    long gevals_ = 0;
};

SolveReport finish(Evaluator& ev, const Vector& x, double f, int iterations, int code, std::string message,
                   Clock::time_point start) {
    SolveReport r;
    r.parameters = x;
    r.value = f;
    r.fevals = ev.fevals();
    r.gevals = ev.gevals();
    r.iterations = iterations;
    r.convergence_code = code;
    r.message = std::move(message);
    r.wall_time_seconds = seconds_since(start);
    return r;
}

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Vector clamp_to(const Vector& x, const std::optional<Bounds>& bounds) {
    if (!bounds) return x;
    return x.cwiseMax(bounds->lower).cwiseMin(bounds->upper);
}

// Active: sitting on a bound with the gradient pushing outward.
std::vector<bool> active_set(const Vector& x, const Vector& g, const std::optional<Bounds>& bounds) {
    std::vector<bool> active(static_cast<std::size_t>(x.size()), false);
    if (!bounds) return active;
    for (Index i = 0; i < x.size(); ++i) {
        const bool at_lower = x[i] <= bounds->lower[i] && g[i] > 0.0;
        const bool at_upper = x[i] >= bounds->upper[i] && g[i] < 0.0;
        active[static_cast<std::size_t>(i)] = at_lower || at_upper;
    }
    return active;
}

Vector zero_active(Vector v, const std::vector<bool>& active) {
    for (Index i = 0; i < v.size(); ++i) {
        if (active[static_cast<std::size_t>(i)]) v[i] = 0.0;
    }
    return v;
}

void check_start(const Vector& x0, const char* who) {
    if (!x0.allFinite()) throw NonFiniteValue(std::string(who) + ": start has non-finite components");
}

// ---- strong-Wolfe search along a (possibly clamped) ray ---------------------

struct SearchPoint {
    double alpha = 0.0;
    Vector x;
    double f = 0.0;
    Vector g;
    double slope = 0.0;
    bool clamped = false;
};

enum class SearchStatus { ok, failed, budget };

struct SearchOutcome {
    SearchStatus status = SearchStatus::failed;
    SearchPoint point;
};

class WolfeSearch {
public:
    WolfeSearch(Evaluator& ev, const SearchPoint& origin, const Vector& direction, const std::optional<Bounds>& bounds,
                double c1, double c2)
        : ev_(ev), origin_(origin), d_(direction), bounds_(bounds), c1_(c1), c2_(c2),
          slope0_(origin.g.dot(direction)) {
        origin_.alpha = 0.0;
        origin_.clamped = false;
    }

    SearchOutcome run(double alpha0) {
        SearchPoint prev = origin_;
        prev.slope = slope0_;
        double alpha = alpha0;
        constexpr double kMaxAlpha = 1e10;
        for (int i = 0; i < 50; ++i) {
            SearchPoint cur = trial(alpha);
            if (ev_.exhausted()) return {SearchStatus::budget, best_so_far(prev, cur)};
            if (!sufficient(cur) || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur);
            complete(cur);
            if (cur.clamped || std::abs(cur.slope) <= -c2_ * slope0_) return {SearchStatus::ok, cur};
            if (cur.slope >= 0.0) return zoom(cur, prev);
            prev = cur;
            if (alpha >= kMaxAlpha) return {SearchStatus::ok, cur};
            alpha = std::min(2.0 * alpha, kMaxAlpha);
        }
        if (prev.alpha > 0.0) return {SearchStatus::ok, prev};
        return {SearchStatus::failed, origin_};
    }

private:
    SearchPoint trial(double alpha) {
        SearchPoint p;
        p.alpha = alpha;
        const Vector ray = origin_.x + alpha * d_;
        p.x = clamp_to(ray, bounds_);
        p.clamped = bounds_ && (p.x.array() != ray.array()).any();
        p.f = ev_.value(p.x);
        return p;
    }

    bool sufficient(const SearchPoint& p) const {
        return acceptable(p.f) && p.f <= origin_.f + c1_ * origin_.g.dot(p.x - origin_.x);
    }

    void complete(SearchPoint& p) {
        p.g = ev_.gradient(p.x);
        if (!p.clamped) {
            p.slope = p.g.dot(d_);
            return;
        }
        const Vector ray = origin_.x + p.alpha * d_;
        Vector d = d_;
        for (Index i = 0; i < d.size(); ++i) {
            if (p.x[i] != ray[i]) d[i] = 0.0;
        }
        p.slope = p.g.dot(d);
    }

    SearchPoint best_so_far(const SearchPoint& prev, SearchPoint cur) {
        if (cur.alpha > 0.0 && sufficient(cur) && cur.f < prev.f) {
            complete(cur);
            return cur;
        }
        return prev;
    }

    SearchOutcome zoom(SearchPoint lo, SearchPoint hi) {
        for (int k = 0; k < 60; ++k) {
            const double span = hi.alpha - lo.alpha;
            if (std::abs(span) * inf_norm(d_) <= 1e-16 * (1.0 + inf_norm(origin_.x))) break;
            double t = 0.5;
            if (acceptable(hi.f)) {
                const double denom = 2.0 * (hi.f - lo.f - lo.slope * span);
                if (denom > 0.0) t = -lo.slope * span / denom;
                t = std::clamp(t, 0.1, 0.9);
            } else {
                t = 0.25;
            }
            SearchPoint cur = trial(lo.alpha + t * span);
            if (ev_.exhausted()) {
                if (sufficient(cur) && cur.f < lo.f) {
                    complete(cur);
                    return {SearchStatus::budget, cur};
                }
                return {SearchStatus::budget, lo};
            }
            if (!sufficient(cur) || cur.f >= lo.f) {
                hi = cur;
                continue;
            }
            complete(cur);
            if (cur.clamped || std::abs(cur.slope) <= -c2_ * slope0_) return {SearchStatus::ok, cur};
            if (cur.slope * span >= 0.0) hi = lo;
            lo = cur;
        }
        // Armijo-only step is still progress.
        if (lo.alpha > 0.0 && lo.f < origin_.f) return {SearchStatus::ok, lo};
        return {SearchStatus::failed, origin_};
    }

    Evaluator& ev_;
    SearchPoint origin_;
    Vector d_;
    const std::optional<Bounds>& bounds_;
    double c1_;
    double c2_;
    double slope0_;
};

bool small_change(double before, double after, double tol) {
    return std::abs(before - after) <= tol * (std::abs(after) + tol);
}

void check_bounds(const Vector& x0, const std::optional<Bounds>& bounds) {
    if (!bounds) return;
    if (bounds->lower.size() != x0.size() || bounds->upper.size() != x0.size()) {
        throw InvalidArgument("bounds length does not match the start");
    }
    if ((bounds->lower.array() > bounds->upper.array()).any()) throw InvalidArgument("lower bound exceeds upper");
}

}  // namespace

SolveReport spg(const Objective& objective, const Gradient& gradient, const Projection& project, const Vector& x0,
                const SolverConfig& config) {
    config.validate();
    check_start(x0, "spg");
    const auto start = Clock::now();
    Evaluator ev(objective, gradient, config.gradient_mode, config.max_function_evals);

    Vector x = project(x0);
    double f = ev.value(x);
    if (!acceptable(f)) throw NonFiniteValue("spg: objective rejected at the projected start");
    Vector g = ev.gradient(x);

    auto projected_step = [&](const Vector& at, const Vector& grad) { return inf_norm(project(at - grad) - at); };
    double pg_norm = projected_step(x, g);
    double lambda = pg_norm > 0.0 ? std::clamp(1.0 / pg_norm, config.bb_step_min, config.bb_step_max) : 1.0;

    int iter = 0;
    std::deque<double> recent{f};
    std::vector<double> history{f};
    auto done = [&](int code, std::string message) {
        SolveReport r = finish(ev, x, f, iter, code, std::move(message), start);
        r.history = history;
        return r;
    };
    constexpr double kGamma = 1e-4;
    while (true) {
        if (pg_norm <= config.g_tolerance * (1.0 + std::abs(f))) return done(convergence::converged, "converged");
        if (iter >= config.max_iterations) {
            return done(convergence::limit_reached, "iteration limit reached");
        }
        ++iter;

        Vector d = project(x - lambda * g) - x;
        double gtd = g.dot(d);
        const double f_max = *std::max_element(recent.begin(), recent.end());

        Vector x_new;
        double f_new = kInf;
        bool arc_accepted = false;
        if (!(gtd < 0.0)) {
            // Non-convex projections (signed sphere) can flip long steps. Search
            // along the projection arc instead, shortening lambda.
            for (double lam = lambda; lam >= config.bb_step_min; lam *= 0.1) {
                const Vector z = project(x - lam * g);
                const double gz = g.dot(z - x);
                if (gz < 0.0) {
                    d = z - x;
                    gtd = gz;
                    break;
                }
                const double fz = ev.value(z);
                if (acceptable(fz) && fz <= f_max - kGamma * std::abs(gz)) {
                    x_new = z;
                    f_new = fz;
                    arc_accepted = true;
                    break;
                }
                if (ev.exhausted()) return done(convergence::limit_reached, "function evaluation limit reached");
            }
            if (!arc_accepted && !(gtd < 0.0)) {
                return done(convergence::line_search_failure, "projected direction is not a descent direction");
            }
        }

        double alpha = 1.0;
        while (!arc_accepted) {
            x_new = project(x + alpha * d);
            f_new = ev.value(x_new);
            if (acceptable(f_new) && f_new <= f_max + kGamma * alpha * gtd) break;
            if (ev.exhausted()) {
                return done(convergence::limit_reached, "function evaluation limit reached");
            }
            if (alpha <= 0.1 || !acceptable(f_new)) {
                alpha *= 0.5;
            } else {
                double trial = -gtd * alpha * alpha / (2.0 * (f_new - f - alpha * gtd));
                if (!(trial >= 0.1 && trial <= 0.9 * alpha)) trial = 0.5 * alpha;
                alpha = trial;
            }
            if (alpha * inf_norm(d) <= 1e-16 * (1.0 + inf_norm(x))) {
                return done(convergence::line_search_failure, "line search step underflow");
            }
        }

        Vector g_new;
        try {
            g_new = ev.gradient(x_new);
        } catch (const NonFiniteValue& e) {
            return done(convergence::line_search_failure, e.what());
        }
        const Vector s = x_new - x;
        const Vector y = g_new - g;
        const double sts = s.squaredNorm();
        const double sty = s.dot(y);
        lambda = sty > 0.0 ? std::clamp(sts / sty, config.bb_step_min, config.bb_step_max) : config.bb_step_max;

        x = x_new;
        f = f_new;
        g = g_new;
        recent.push_back(f);
        history.push_back(f);
        if (static_cast<int>(recent.size()) > config.step_memory) recent.pop_front();
        pg_norm = projected_step(x, g);
        if (ev.exhausted() && pg_norm > config.g_tolerance * (1.0 + std::abs(f))) {
            return done(convergence::limit_reached, "function evaluation limit reached");
        }
    }
}

namespace {

enum class Update { bfgs, polak_ribiere };

// Shared driver for vm and cg; they differ in direction update and c2.
SolveReport descent_solve(const Objective& objective, const Gradient& gradient, const Vector& x0,
                          const SolverConfig& config, const std::optional<Bounds>& bounds, Update update) {
    config.validate();
    const char* who = update == Update::bfgs ? "vm" : "cg";
    check_start(x0, who);
    check_bounds(x0, bounds);
    const auto start = Clock::now();
    Evaluator ev(objective, gradient, config.gradient_mode, config.max_function_evals);

    SearchPoint here;
    here.x = clamp_to(x0, bounds);
    here.f = ev.value(here.x);
    if (!acceptable(here.f)) throw NonFiniteValue(std::string(who) + ": objective rejected at the start");
    here.g = ev.gradient(here.x);

    const Index n = here.x.size();
    const double c2 = update == Update::bfgs ? 0.9 : 0.1;
    Eigen::MatrixXd h_inv;
    bool fresh = true;  // h_inv is the identity / d is steepest descent
    Vector d;
    Vector free_g_prev;
    double slope_prev = 0.0;
    double alpha_prev = 1.0;
    int since_restart = 0;
    int quiet_steps = 0;

    for (int iter = 0;; ++iter) {
        const auto active = active_set(here.x, here.g, bounds);
        const Vector free_g = zero_active(here.g, active);
        if (inf_norm(free_g) <= config.g_tolerance * (1.0 + std::abs(here.f))) {
            return finish(ev, here.x, here.f, iter, convergence::converged, "converged", start);
        }
        if (iter >= config.max_iterations) {
            return finish(ev, here.x, here.f, iter, convergence::limit_reached, "iteration limit reached", start);
        }

        if (update == Update::bfgs) {
            d = fresh ? Vector(-free_g) : Vector(-(h_inv * free_g));
        } else if (fresh || iter == 0) {
            d = -free_g;
        } else {
            const double beta = std::max(0.0, free_g.dot(free_g - free_g_prev) / free_g_prev.squaredNorm());
            d = -free_g + beta * d;
        }
        d = zero_active(d, active);
        if (!(here.g.dot(d) < 0.0)) {
            fresh = true;
            d = -free_g;
        }

        const double slope = here.g.dot(d);
        double alpha0 = 1.0;
        if (update == Update::bfgs) {
            if (fresh) alpha0 = std::min(1.0, 1.0 / inf_norm(free_g));
        } else if (iter == 0 || fresh) {
            alpha0 = std::min(1.0, 1.0 / inf_norm(free_g));
            if (iter > 0) alpha0 = std::max(alpha0, alpha_prev * slope_prev / slope);
        } else {
            alpha0 = alpha_prev * slope_prev / slope;
        }
        if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) alpha0 = 1.0;

        SearchOutcome out;
        try {
            out = WolfeSearch(ev, here, d, bounds, 1e-4, c2).run(alpha0);
        } catch (const NonFiniteValue& e) {
            return finish(ev, here.x, here.f, iter, convergence::line_search_failure, e.what(), start);
        }
        if (out.status == SearchStatus::failed) {
            if (!fresh) {
                fresh = true;
                h_inv.resize(0, 0);
                since_restart = 0;
                continue;
            }
            // Steepest descent cannot move the point: converged to working
            // precision if the gradient is already small.
            if (inf_norm(free_g) <= 1e-5 * (1.0 + std::abs(here.f))) {
                return finish(ev, here.x, here.f, iter, convergence::converged,
                              "no decrease possible along steepest descent", start);
            }
            return finish(ev, here.x, here.f, iter, convergence::line_search_failure, "line search failed", start);
        }
        SearchPoint next = std::move(out.point);
        if (out.status == SearchStatus::budget) {
            return finish(ev, next.x, next.f, iter + 1, convergence::limit_reached, "function evaluation limit reached",
                          start);
        }

        const Vector s = next.x - here.x;
        const Vector y = next.g - here.g;
        const double sy = s.dot(y);
        if (update == Update::bfgs) {
            if (sy > 1e-12 * s.norm() * y.norm()) {
                if (fresh) {
                    h_inv = (sy / y.squaredNorm()) * Eigen::MatrixXd::Identity(n, n);
                }
                const Vector hy = h_inv * y;
                const double rho = 1.0 / sy;
                h_inv += (rho * rho * (sy + y.dot(hy))) * (s * s.transpose()) -
                         rho * (hy * s.transpose() + s * hy.transpose());
                fresh = false;
            }
        } else {
            fresh = ++since_restart >= std::max<Index>(n, 1);
            if (fresh) since_restart = 0;
        }
        free_g_prev = free_g;
        slope_prev = slope;
        alpha_prev = next.alpha;

        const double f_before = here.f;
        here = std::move(next);
        quiet_steps = small_change(f_before, here.f, config.f_tolerance) ? quiet_steps + 1 : 0;
        if (quiet_steps >= 2) {
            return finish(ev, here.x, here.f, iter + 1, convergence::converged, "relative function change below tolerance",
                          start);
        }
    }
}

}  // namespace

SolveReport vm(const Objective& objective, const Gradient& gradient, const Vector& x0, const SolverConfig& config,
               const std::optional<Bounds>& bounds) {
    return descent_solve(objective, gradient, x0, config, bounds, Update::bfgs);
}

SolveReport cg(const Objective& objective, const Gradient& gradient, const Vector& x0, const SolverConfig& config,
               const std::optional<Bounds>& bounds) {
    return descent_solve(objective, gradient, x0, config, bounds, Update::polak_ribiere);
}

SolveReport nelder_mead(const Objective& objective, const Vector& x0, const SolverConfig& config) {
    config.validate();
    check_start(x0, "nelder_mead");
    const auto start = Clock::now();
    const Gradient none;
    Evaluator ev(objective, none, GradientMode::central, config.max_function_evals);
    const Index n = x0.size();

    const double f0 = ev.value(x0);
    if (!acceptable(f0)) throw NonFiniteValue("nelder_mead: objective rejected at the start");
    if (n == 0) return finish(ev, x0, f0, 0, convergence::converged, "nothing to optimize", start);

    double step = 0.1 * inf_norm(x0);
    if (step == 0.0) step = 0.1;
    std::vector<Vector> pts{x0};
    std::vector<double> vals{f0};
    for (Index i = 0; i < n; ++i) {
        Vector p = x0;
        p[i] += step;
        pts.push_back(p);
        vals.push_back(ev.value(p));
    }

    std::vector<std::size_t> order(pts.size());
    int iter = 0;
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        if (acceptable(vals[worst]) && small_change(vals[worst], vals[best], config.f_tolerance)) {
            return finish(ev, pts[best], vals[best], iter, convergence::converged, "converged", start);
        }
        if (ev.exhausted() || iter >= config.max_iterations) {
            return finish(ev, pts[best], vals[best], iter, convergence::limit_reached, "budget exhausted", start);
        }
        ++iter;

        Vector centroid = Vector::Zero(n);
        for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += pts[order[k]];
        centroid /= static_cast<double>(n);

        const Vector reflected = centroid + (centroid - pts[worst]);
        const double f_reflected = ev.value(reflected);
        if (f_reflected < vals[best]) {
            const Vector expanded = centroid + 2.0 * (reflected - centroid);
            const double f_expanded = ev.value(expanded);
            if (f_expanded < f_reflected) {
                pts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                pts[worst] = reflected;
                vals[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < vals[second_worst]) {
            pts[worst] = reflected;
            vals[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < vals[worst];
        const Vector contracted =
            outside ? Vector(centroid + 0.5 * (reflected - centroid)) : Vector(centroid + 0.5 * (pts[worst] - centroid));
        const double f_contracted = ev.value(contracted);
        if (outside ? f_contracted <= f_reflected : f_contracted < vals[worst]) {
            pts[worst] = contracted;
            vals[worst] = f_contracted;
            continue;
        }
        for (std::size_t k = 1; k < order.size(); ++k) {
            const std::size_t idx = order[k];
            pts[idx] = pts[best] + 0.5 * (pts[idx] - pts[best]);
            vals[idx] = ev.value(pts[idx]);
        }
    }
}

Vector numerical_gradient(const Objective& objective, const Vector& x, GradientMode mode) {
    if (mode == GradientMode::analytic) throw InvalidArgument("numerical_gradient needs forward or central mode");
    const Index n = x.size();
    Vector g(n);
    Vector probe = x;
    auto eval = [&](const Vector& p) {
        const double v = objective(p);
        if (!std::isfinite(v)) throw NonFiniteValue("numerical_gradient: non-finite probe value");
        return v;
    };
    if (mode == GradientMode::forward) {
        const double f0 = eval(x);
        for (Index i = 0; i < n; ++i) {
            const double h = 1e-7 * (1.0 + std::abs(x[i]));
            probe[i] = x[i] + h;
            g[i] = (eval(probe) - f0) / h;
            probe[i] = x[i];
        }
        return g;
    }
    for (Index i = 0; i < n; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        probe[i] = x[i] + h;
        const double up = eval(probe);
        probe[i] = x[i] - h;
        const double down = eval(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

GradientCheck check_gradient(const Objective& objective, const Gradient& gradient, const Vector& x, double tol) {
    GradientCheck out;
    Vector analytic;
    Vector numeric;
    try {
        analytic = gradient(x);
    } catch (const std::exception& e) {
        out.diagnostic = std::string("analytic gradient raised: ") + e.what();
        out.max_rel_diff = kInf;
        return out;
    }
    try {
        numeric = numerical_gradient(objective, x, GradientMode::central);
    } catch (const std::exception& e) {
        out.diagnostic = std::string("central difference failed: ") + e.what();
        out.max_rel_diff = kInf;
        return out;
    }
    if (analytic.size() != numeric.size()) {
        out.diagnostic = "analytic gradient has the wrong length";
        out.max_rel_diff = kInf;
        return out;
    }
    if (!analytic.allFinite() || !numeric.allFinite()) {
        out.diagnostic = "non-finite gradient component";
        out.max_rel_diff = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double scale = std::max({inf_norm(analytic), inf_norm(numeric), 1e-8});
    out.max_rel_diff = analytic.size() ? (analytic - numeric).cwiseAbs().maxCoeff() / scale : 0.0;
    out.pass = out.max_rel_diff <= tol;
    if (!out.pass) {
        std::ostringstream msg;
        msg << "max relative difference " << out.max_rel_diff << " exceeds " << tol;
        out.diagnostic = msg.str();
    }
    return out;
}

KktResult kkt_check(const Objective& objective, const Vector& x, const Gradient& gradient,
                    const std::optional<Bounds>& bounds) {
    KktResult r;
    const double f = objective(x);
    auto grad_at = [&](const Vector& p) {
        return gradient ? gradient(p) : numerical_gradient(objective, p, GradientMode::central);
    };
    const Vector g = grad_at(x);

    std::vector<Index> free;
    for (Index i = 0; i < x.size(); ++i) {
        bool active = false;
        if (bounds) {
            const double tol_lo = 1e-10 * (1.0 + std::abs(bounds->lower[i]));
            const double tol_hi = 1e-10 * (1.0 + std::abs(bounds->upper[i]));
            active = (x[i] <= bounds->lower[i] + tol_lo && g[i] > 0.0) ||
                     (x[i] >= bounds->upper[i] - tol_hi && g[i] < 0.0);
        }
        if (!active) free.push_back(i);
    }
    double pg = 0.0;
    for (Index i : free) pg = std::max(pg, std::abs(g[i]));
    r.projected_gradient_norm = pg;
    r.kkt1 = pg <= 1e-5 * (1.0 + std::abs(f));

    const auto m = static_cast<Index>(free.size());
    if (m == 0) {
        r.kkt2 = true;
        return r;
    }
    Eigen::MatrixXd hess(m, m);
    Vector probe = x;
    if (gradient) {
        for (Index c = 0; c < m; ++c) {
            const Index j = free[static_cast<std::size_t>(c)];
            const double h = 1e-6 * (1.0 + std::abs(x[j]));
            probe[j] = x[j] + h;
            const Vector up = grad_at(probe);
            probe[j] = x[j] - h;
            const Vector down = grad_at(probe);
            probe[j] = x[j];
            for (Index rrow = 0; rrow < m; ++rrow) {
                const Index i = free[static_cast<std::size_t>(rrow)];
                hess(rrow, c) = (up[i] - down[i]) / (2.0 * h);
            }
        }
    } else {
        for (Index a = 0; a < m; ++a) {
            const Index i = free[static_cast<std::size_t>(a)];
            const double hi = 1e-4 * (1.0 + std::abs(x[i]));
            for (Index b = a; b < m; ++b) {
                const Index j = free[static_cast<std::size_t>(b)];
                const double hj = 1e-4 * (1.0 + std::abs(x[j]));
                auto at = [&](double si, double sj) {
                    probe = x;
                    probe[i] += si * hi;
                    probe[j] += sj * hj;
                    return objective(probe);
                };
                const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
                hess(a, b) = v;
                hess(b, a) = v;
            }
        }
    }
    const Eigen::MatrixXd sym = 0.5 * (hess + hess.transpose());
    if (!sym.allFinite()) {
        r.kkt2 = false;
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = eig.eigenvalues().minCoeff();
    r.max_eigenvalue = eig.eigenvalues().maxCoeff();
    r.kkt2 = r.min_eigenvalue > 1e-5 * std::max(1.0, std::abs(r.max_eigenvalue));
    return r;
}

QpSolution solve_eq_qp(const SymmetricMatrix& d_matrix, const Vector& d, const Eigen::MatrixXd& a, const Vector& b) {
    const Index n = d_matrix.order();
    const Index m = a.cols();
    if (d.size() != n || a.rows() != n || b.size() != m) throw InvalidArgument("solve_eq_qp: dimension mismatch");
    Eigen::MatrixXd dm(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) dm(i, j) = d_matrix(i, j);
    }
    if (Eigen::LLT<Eigen::MatrixXd>(dm).info() != Eigen::Success) {
        throw InvalidArgument("solve_eq_qp: D must be positive definite");
    }

    // [ D  -A ] [x]   [d]
    // [ A'  0 ] [l] = [b]
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = dm;
    kkt.topRightCorner(n, m) = -a;
    kkt.bottomLeftCorner(m, n) = a.transpose();
    Vector rhs(n + m);
    rhs << d, b;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) throw SingularSystem("solve_eq_qp: singular KKT system");
    const Vector z = lu.solve(rhs);

    QpSolution out;
    out.solution = z.head(n);
    out.multipliers = z.tail(m);
    out.problem_value = out.solution.dot(dm * out.solution);
    out.objective_value = 0.5 * out.problem_value - d.dot(out.solution);
    const double scale = kkt.cwiseAbs().maxCoeff() * inf_norm(z) + inf_norm(rhs);
    out.kkt_residual = scale > 0.0 ? inf_norm(kkt * z - rhs) / scale : 0.0;
    return out;
}

}  // namespace sumscale
