#include "sumscale/harness.hpp"
#include "sumscale/projections.hpp"

#include <doctest.h>

#include <cmath>

using namespace sumscale;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

double max_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

Vector random_vector(SplitMix64& rng, Index n, double lo, double hi) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
    return v;
}

Vector random_simplex_point(SplitMix64& rng, Index n) {
    Vector e(n);
    for (Index i = 0; i < n; ++i) e[i] = -std::log(1.0 - rng.uniform());
    return e / e.sum();
}

}  // namespace

TEST_CASE("project_unit_sum") {
    CHECK(max_diff(project_unit_sum(vec({2, 2})), vec({0.5, 0.5})) == 0.0);
    CHECK(max_diff(project_unit_sum(Vector::Constant(100, 0.01)), Vector::Constant(100, 0.01)) <= 1e-15);
    CHECK(max_diff(project_unit_sum(vec({1, 2, 3, 4})), vec({0.1, 0.2, 0.3, 0.4})) <= 1e-15);
    CHECK_THROWS_AS(project_unit_sum(vec({1, -1})), DegenerateInput);
}

TEST_CASE("project_simplex examples") {
    CHECK(max_diff(project_simplex(vec({0.5, 0.3, 0.2})), vec({0.5, 0.3, 0.2})) <= 1e-15);
    CHECK(max_diff(project_simplex(vec({2, 0, 0})), vec({1, 0, 0})) == 0.0);
    CHECK(max_diff(project_simplex(vec({0.9, 0.4, 0.2})), vec({0.7333333, 0.2333333, 0.0333333})) <= 5e-8);
}

TEST_CASE("project_simplex matches a grid search on the 3-simplex") {
    const Vector y = vec({0.9, 0.4, 0.2});
    const Vector p = project_simplex(y);
    double best = 1e300;
    const int steps = 600;
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; i + j <= steps; ++j) {
            const Vector z = vec({double(i) / steps, double(j) / steps, double(steps - i - j) / steps});
            best = std::min(best, (z - y).squaredNorm());
        }
    }
    CHECK((p - y).squaredNorm() <= best + 1e-12);
}

TEST_CASE("project_simplex optimality and feasibility") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 3 + trial % 4;
        const Vector y = random_vector(rng, n, -2.0, 2.0);
        const Vector p = project_simplex(y);
        CHECK(p.minCoeff() >= 0.0);
        CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
        const double dist = (p - y).norm();
        bool optimal = true;
        for (int k = 0; k < 10000; ++k) {
            if (dist > (random_simplex_point(rng, n) - y).norm() + 1e-9) optimal = false;
        }
        CHECK(optimal);
    }
}

TEST_CASE("sphere projections") {
    const Vector x = vec({0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    CHECK(max_diff(project_sphere_signed(x), vec({0.1048285, 0.209657, 0.3144855, 0.4193139, 0.5241424, 0.6289709})) <=
          5e-8);
    CHECK(max_diff(project_sphere_signed(vec({-3, 0})), vec({1, 0})) == 0.0);
    CHECK(max_diff(project_sphere_signed(vec({0, 2})), vec({0, 1})) == 0.0);
    CHECK(max_diff(project_sphere_signed(vec({0, -2})), vec({0, 1})) == 0.0);
    CHECK(max_diff(project_sphere_unsigned(vec({3, 4})), vec({0.6, 0.8})) <= 1e-15);
    CHECK(max_diff(project_sphere_unsigned(vec({-3, 0})), vec({-1, 0})) == 0.0);
    CHECK_THROWS_AS(project_sphere_signed(Vector::Zero(3)), DegenerateInput);
    CHECK_THROWS_AS(project_sphere_unsigned(Vector::Zero(3)), DegenerateInput);
}

TEST_CASE("project_box") {
    const Vector lo = Vector::Zero(3);
    const Vector hi = Vector::Ones(3);
    CHECK(max_diff(project_box(vec({-1, 0.5, 2}), lo, hi), vec({0, 0.5, 1})) == 0.0);
    CHECK(max_diff(project_box(vec({0.2, 0.5, 0.9}), lo, hi), vec({0.2, 0.5, 0.9})) == 0.0);
    CHECK(max_diff(project_box(lo, lo, hi), lo) == 0.0);
    CHECK_THROWS_AS(project_box(lo, hi, lo), InvalidArgument);
}

TEST_CASE("idempotence and sign law") {
    SplitMix64 rng(3);
    const Bounds box = Bounds::uniform(5, -0.5, 0.5);
    for (const auto& name : projection_names()) {
        CAPTURE(name);
        const Projection p = projection_from_name(name, &box);
        for (int trial = 0; trial < 1000; ++trial) {
            Vector x = random_vector(rng, 5, -2.0, 2.0);
            if (name == "unit-sum") x = x.cwiseAbs();
            const Vector once = p(x);
            CHECK(max_diff(p(once), once) <= 1e-12);
            if (name == "sphere-signed") {
                Index i = 0;
                while (once[i] == 0.0) ++i;
                CHECK(once[i] > 0.0);
            }
        }
    }
    CHECK_THROWS_AS(projection_from_name("box"), InvalidArgument);
    CHECK_THROWS_AS(projection_from_name("cube"), InvalidArgument);
}
