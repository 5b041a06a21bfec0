#include "sumscale/problems.hpp"
#include "sumscale/projections.hpp"
#include "sumscale/solvers.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace sumscale;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

SolverConfig config_for(Method m) {
    SolverConfig c;
    c.method = m;
    return c;
}

}  // namespace

TEST_CASE("config validation and names") {
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.g_tolerance = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = SolverConfig{};
    c.step_memory = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    for (auto m : {Method::spg, Method::vm, Method::cg, Method::nelder_mead}) {
        CHECK(method_from_string(to_string(m)) == m);
    }
    CHECK_THROWS_AS(method_from_string("newton"), InvalidArgument);
    CHECK(gradient_mode_from_string("central") == GradientMode::central);
}

TEST_CASE("spg on the simplex") {
    const Projection simplex{"simplex", project_simplex};
    for (Index n : {5, 100}) {
        CAPTURE(n);
        const Vector x0 = project_simplex(multinomial_start(n, n));
        const auto r = spg(nllrv, nllrv_grad, simplex, x0, config_for(Method::spg));
        CHECK(r.convergence_code == 0);
        CHECK(r.value == doctest::Approx(n * std::log(double(n))).epsilon(1e-10));
        CHECK((r.parameters - Vector::Constant(n, 1.0 / n)).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK(r.value == nllrv(r.parameters));
        REQUIRE_FALSE(r.history.empty());
        CHECK(r.history.back() == r.value);
    }
}

TEST_CASE("spg fixed point") {
    const Projection simplex{"simplex", project_simplex};
    const Vector x = Vector::Constant(4, 0.25);
    const auto r = spg(nllrv, nllrv_grad, simplex, x, config_for(Method::spg));
    CHECK(r.convergence_code == 0);
    CHECK((r.parameters - x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spg with a signed sphere finds the largest eigenvalue") {
    const auto m = moler_matrix(10);
    const Projection sphere{"sphere-signed", project_sphere_signed};
    const auto f = [&](const Vector& x) { return -rayleigh_quotient(x, m); };
    const auto g = [&](const Vector& x) -> Vector { return -rq_grad(x, m); };
    const auto r = spg(f, g, sphere, Vector::Ones(10).normalized(), config_for(Method::spg));
    CHECK(r.convergence_code == 0);
    CHECK(-r.value == doctest::Approx(31.58981).epsilon(1e-6));
}

TEST_CASE("vm and cg with bounds") {
    const auto bounds = Bounds::uniform(9, 0.0, 1.0);
    for (auto m : {Method::vm, Method::cg}) {
        CAPTURE(to_string(m));
        const auto solve = m == Method::vm ? vm : cg;
        const auto r = solve(nll, nll_grad, multinomial_start(9, 10), config_for(m), bounds);
        CHECK(r.convergence_code == 0);
        CHECK(r.value == doctest::Approx(10 * std::log(10.0)).epsilon(1e-10));
        CHECK(r.value == nll(r.parameters));
    }
}

TEST_CASE("vm and cg on Rosenbrock from the standard start") {
    for (auto m : {Method::vm, Method::cg}) {
        CAPTURE(to_string(m));
        const auto solve = m == Method::vm ? vm : cg;
        SolverConfig c = config_for(m);
        c.max_iterations = 20000;
        c.max_function_evals = 200000;
        const auto r = solve(rosbkext, rosbkext_grad, vec({-1.2, 1.0}), c, std::nullopt);
        CHECK(r.convergence_code == 0);
        CHECK(r.value <= 1e-10);
    }
}

TEST_CASE("nelder_mead") {
    const auto r = nelder_mead(neg_prod_scaled, Vector::Constant(4, 0.2) + vec({0.05, 0, -0.02, 0}),
                               config_for(Method::nelder_mead));
    CHECK(r.convergence_code == 0);
    CHECK(r.value == doctest::Approx(-std::pow(4.0, -4.0)).epsilon(1e-8));
    CHECK(r.gevals == 0);
}

TEST_CASE("numerical gradient modes") {
    const Vector x = vec({0.3, -0.8});
    const Vector exact = rosbkext_grad(x);
    CHECK((numerical_gradient(rosbkext, x, GradientMode::central) - exact).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((numerical_gradient(rosbkext, x, GradientMode::forward) - exact).cwiseAbs().maxCoeff() <= 1e-3);
    const auto nan = [](const Vector&) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(numerical_gradient(nan, x, GradientMode::central), NonFiniteValue);
}

TEST_CASE("gradient check flags wrong gradients without throwing") {
    const Vector x = vec({0.3, -0.8});
    CHECK(check_gradient(rosbkext, rosbkext_grad, x, 1e-6).pass);
    const auto wrong = [](const Vector& v) -> Vector { return 2.0 * rosbkext_grad(v); };
    CHECK_FALSE(check_gradient(rosbkext, wrong, x, 1e-6).pass);
    const auto nan = [](const Vector&) { return std::numeric_limits<double>::quiet_NaN(); };
    GradientCheck c;
    CHECK_NOTHROW(c = check_gradient(nan, rosbkext_grad, x, 1e-6));
    CHECK_FALSE(c.pass);
}

TEST_CASE("kkt check") {
    const auto at_min = kkt_check(rosbkext, Vector::Ones(3), rosbkext_grad);
    CHECK(at_min.kkt1);
    CHECK(at_min.kkt2);
    const auto away = kkt_check(rosbkext, vec({0.0, 0.0, 0.0}), rosbkext_grad);
    CHECK_FALSE(away.kkt1);
    const auto saddle = kkt_check([](const Vector& v) { return v[0] * v[0] - v[1] * v[1]; }, Vector::Zero(2));
    CHECK(saddle.kkt1);
    CHECK_FALSE(saddle.kkt2);
    const auto edge = kkt_check([](const Vector& v) { return v[0] + v[1] * v[1]; }, Vector::Zero(2), {},
                                Bounds::uniform(2, 0.0, 1.0));
    CHECK(edge.kkt1);
}

TEST_CASE("equality-constrained QP") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(3, 1);
    const auto qp = solve_eq_qp(SymmetricMatrix::diagonal({1, 2, 3}), Vector::Zero(3), a, vec({1}));
    CHECK((qp.solution - vec({6.0 / 11, 3.0 / 11, 2.0 / 11})).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(qp.problem_value == doctest::Approx(6.0 / 11).epsilon(1e-12));
    CHECK(qp.kkt_residual <= 1e-12);

    Eigen::MatrixXd a2 = Eigen::MatrixXd::Ones(2, 1);
    const auto id = solve_eq_qp(SymmetricMatrix::identity(2), Vector::Zero(2), a2, vec({1}));
    CHECK((id.solution - vec({0.5, 0.5})).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(id.multipliers[0] == doctest::Approx(0.5));

    Eigen::MatrixXd twice(2, 2);
    twice << 1, 1, 1, 1;
    CHECK_THROWS_AS(solve_eq_qp(SymmetricMatrix::identity(2), Vector::Zero(2), twice, vec({1, 1})), SingularSystem);
}

TEST_CASE("rejected trial points and counters") {
    int calls = 0;
    const auto f = [&](const Vector& x) {
        ++calls;
        return nll(x);
    };
    const auto r = vm(f, nll_grad, multinomial_start(4, 5), config_for(Method::vm));
    CHECK(r.convergence_code == 0);
    CHECK(r.fevals == calls);
    CHECK(r.value == doctest::Approx(5 * std::log(5.0)).epsilon(1e-10));
}
