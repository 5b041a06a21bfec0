#include "sumscale/oracle.hpp"
#include "sumscale/problems.hpp"
#include "sumscale/solvers.hpp"

#include <doctest.h>

#include <cfloat>
#include <cmath>

using namespace sumscale;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("neg_prod_scaled") {
    CHECK(neg_prod_scaled(Vector::Constant(5, 0.2)) == doctest::Approx(-0.00032));
    CHECK(neg_prod_scaled(vec({1, 1})) == doctest::Approx(-0.25));
    CHECK(neg_prod_scaled(vec({2, 4, 6, 8, 10})) == doctest::Approx(neg_prod_scaled(vec({1, 2, 3, 4, 5}))).epsilon(1e-12));
    CHECK_THROWS_AS(neg_prod_scaled(vec({1, -1})), DegenerateInput);
}

TEST_CASE("neg_prod_scaled underflows between n = 140 and n = 143") {
    CHECK(neg_prod_scaled(Vector::Ones(140)) < 0.0);
    CHECK(neg_prod_scaled(Vector::Ones(143)) == 0.0);
    CHECK(neg_prod_scaled(Vector::Ones(20)) == doctest::Approx(-std::pow(20.0, -20.0)).epsilon(1e-12));
}

TEST_CASE("neg_prod_loo") {
    CHECK(neg_prod_loo(Vector::Constant(4, 0.2)) == doctest::Approx(-0.00032));
    CHECK(neg_prod_loo(vec({0.5})) == doctest::Approx(-0.25));
    CHECK(neg_prod_loo(vec({0, 0.3})) == 0.0);
}

TEST_CASE("nll golden values and safeguard") {
    CHECK(nll(Vector::Constant(4, 0.2)) == doctest::Approx(8.04719).epsilon(1e-6));
    CHECK(nll(Vector::Constant(99, 0.01)) == doctest::Approx(460.517).epsilon(1e-6));
    CHECK(nll(Vector::Constant(999, 0.001)) == doctest::Approx(6907.755).epsilon(1e-6));
    CHECK(nll_grad(Vector::Constant(4, 0.2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(nll(vec({0.6, 0.5})) == DBL_MAX);
    CHECK(nll(vec({0.0, 0.5})) == DBL_MAX);
    CHECK_THROWS_AS(nll_grad(vec({0.6, 0.5})), InfeasiblePoint);
}

TEST_CASE("enll") {
    CHECK(enll(Vector::Zero(100)) == doctest::Approx(100 * std::log(100.0)).epsilon(1e-12));
    CHECK(enll(Vector::Constant(100, std::log(0.505))) == doctest::Approx(460.517).epsilon(1e-6));
    CHECK(enll_grad(Vector::Constant(7, 1.3)).cwiseAbs().maxCoeff() <= 1e-12);
    const Vector lx = vec({0.1, -0.4, 0.9});
    CHECK(enll(lx) == doctest::Approx(enll(lx + Vector::Constant(3, 2.5))).epsilon(1e-12));
}

TEST_CASE("xnll") {
    const Vector lx = Vector::Constant(99, std::log(0.01));
    CHECK(xnll(lx) == doctest::Approx(460.517).epsilon(1e-6));
    CHECK(xnll_grad(lx).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(xnll(vec({0.0})) == kXnllPlateau);
}

TEST_CASE("nllrv") {
    CHECK(nllrv(Vector::Constant(100, 0.01)) == doctest::Approx(460.517).epsilon(1e-6));
    CHECK(nllrv(Vector::Ones(6)) == 0.0);
    const Vector g = nllrv_grad(vec({0.5, 0.25}));
    CHECK(g[0] == doctest::Approx(-2));
    CHECK(g[1] == doctest::Approx(-4));
    CHECK_THROWS_AS(nllrv(vec({0.5, 0.0})), InfeasiblePoint);
}

TEST_CASE("moler matrix") {
    const auto m = moler_matrix(3);
    const double expected[3][3] = {{1, -1, -1}, {-1, 2, 0}, {-1, 0, 3}};
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 3; ++j) CHECK(m(i, j) == expected[i][j]);
    }
    CHECK_THROWS_AS(moler_matrix(0), InvalidArgument);
    const auto eig = jacobi_eigen(moler_matrix(10));
    CHECK(eig.values.back() == doctest::Approx(31.58981).epsilon(1e-6));
    CHECK(eig.values.front() == doctest::Approx(8.582807e-06).epsilon(1e-5));
    for (Index n = 2; n <= 20; ++n) CHECK(jacobi_eigen(moler_matrix(n)).values.front() > 0.0);
}

TEST_CASE("rayleigh quotient") {
    const auto a = SymmetricMatrix::diagonal({1, 2});
    CHECK(rayleigh_quotient(vec({1, 0}), a) == 1.0);
    const Vector x = vec({0.3, -1.2});
    CHECK(rayleigh_quotient(3.0 * x, a) == doctest::Approx(rayleigh_quotient(x, a)).epsilon(1e-12));
    CHECK(rayleigh_quotient(-x, a) == doctest::Approx(rayleigh_quotient(x, a)).epsilon(1e-12));
    CHECK(std::abs(x.dot(rq_grad(x, a))) <= 1e-12);
    CHECK_THROWS_AS(rayleigh_quotient(Vector::Zero(2), a), DegenerateInput);

    const auto m = moler_matrix(10);
    const auto eig = jacobi_eigen(m);
    CHECK(rayleigh_quotient(eig.vectors.back(), m) == doctest::Approx(31.58981).epsilon(1e-6));
    CHECK(rq_grad(eig.vectors.back(), m).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(rayleigh_quotient(x, a, SymmetricMatrix::identity(2)) == doctest::Approx(rayleigh_quotient(x, a)));
}

TEST_CASE("rosbkext") {
    CHECK(rosbkext(Vector::Ones(6)) == 0.0);
    CHECK(rosbkext(vec({0.7480008, 0.5649858, 0.3273749, 0.1165386, 0.0230208, 0.0005225})) ==
          doctest::Approx(2.467509).epsilon(1e-6));
    Vector x0 = vec({0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    CHECK(rosbkext(x0) == doctest::Approx(46.34).epsilon(1e-4));
    CHECK(rosbkext(x0.normalized()) == doctest::Approx(48.67305).epsilon(1e-6));
    CHECK_THROWS_AS(rosbkext(vec({1.0})), InvalidArgument);
}

TEST_CASE("heq") {
    CHECK(heq(vec({1, 0, 0})) == 0.0);
    CHECK(heq(vec({0.5, 0.5})) == 0.5);
    CHECK(heq(Vector::Zero(4)) == 1.0);
}

TEST_CASE("weighted sums of squares") {
    const Vector x = vec({6.0 / 11, 3.0 / 11, 2.0 / 11});
    CHECK(weighted_ssq_scaled(x) == doctest::Approx(6.0 / 11).epsilon(1e-12));
    CHECK(weighted_ssq_raw(x) == doctest::Approx(6.0 / 11).epsilon(1e-12));
    CHECK(weighted_ssq_raw(vec({1, 0, 0})) == 1.0);
    CHECK(weighted_ssq_scaled(vec({0.5454545, 0.2727273, 0.1818182})) == doctest::Approx(0.5454545).epsilon(1e-6));
    CHECK(weighted_ssq_scaled(7.0 * x) == doctest::Approx(weighted_ssq_scaled(x)).epsilon(1e-12));
    CHECK_THROWS_AS(weighted_ssq_scaled(vec({1, -1})), DegenerateInput);
}

TEST_CASE("analytic gradients agree with central differences") {
    const Vector pos = vec({0.1, 0.25, 0.15, 0.3});
    const Vector any = vec({0.4, -0.7, 1.1, 0.2});
    struct Case {
        const char* name;
        Objective f;
        Gradient g;
        Vector x;
    };
    const auto m = moler_matrix(4);
    const Case cases[] = {
        {"neg_prod_scaled", neg_prod_scaled, neg_prod_scaled_grad, pos},
        {"neg_prod_loo", neg_prod_loo, neg_prod_loo_grad, pos},
        {"nll", nll, nll_grad, pos},
        {"enll", enll, enll_grad, any},
        {"xnll", xnll, xnll_grad, Vector(pos.array().log())},
        {"nllrv", nllrv, nllrv_grad, pos},
        {"nll_scaled", nll_scaled, nll_scaled_grad, pos},
        {"rq", [&](const Vector& v) { return rayleigh_quotient(v, m); }, [&](const Vector& v) { return rq_grad(v, m); },
         any},
        {"rosbkext", rosbkext, rosbkext_grad, any},
        {"wssq_scaled", weighted_ssq_scaled, weighted_ssq_scaled_grad, pos},
        {"wssq_raw", weighted_ssq_raw, weighted_ssq_raw_grad, any},
    };
    for (const auto& c : cases) {
        CAPTURE(c.name);
        const auto check = check_gradient(c.f, c.g, c.x, 1e-6);
        CHECK_MESSAGE(check.pass, check.diagnostic);
    }
}

TEST_CASE("problem registry") {
    for (const auto& name : problem_names()) {
        CAPTURE(name);
        const Problem p = make_problem(name, 6);
        CHECK(p.dim > 0);
        CHECK(p.default_start.size() == p.dim);
        if (p.known_parameters && p.known_value) {
            CHECK(p.objective(*p.known_parameters) ==
                  doctest::Approx(*p.known_value).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(make_problem("no-such-problem", 5), InvalidArgument);
    CHECK(multinomial_start(3, 4)[2] == doctest::Approx(3.0 / 16));
}

TEST_CASE("known solutions of the nll family") {
    const Problem p = make_nll(10);
    REQUIRE(p.known_solution);
    CHECK(p.known_solution->size() == 10);
    CHECK((*p.known_solution - Vector::Constant(10, 0.1)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(p.raw(Vector::Constant(9, 0.1)).size() == 10);
}
