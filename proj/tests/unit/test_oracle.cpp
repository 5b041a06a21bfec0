#include "sumscale/oracle.hpp"
#include "sumscale/problems.hpp"

#include <doctest.h>

#include <cmath>

using namespace sumscale;

TEST_CASE("diagonal matrix") {
    const auto eig = jacobi_eigen(SymmetricMatrix::diagonal({3, 1, 2}));
    REQUIRE(eig.values.size() == 3);
    CHECK(eig.values[0] == 1.0);
    CHECK(eig.values[1] == 2.0);
    CHECK(eig.values[2] == 3.0);
    CHECK(std::abs(eig.vectors[0][1]) == doctest::Approx(1.0));
}

TEST_CASE("2x2") {
    const auto eig = jacobi_eigen(SymmetricMatrix::from_rows({{2, 1}, {1, 2}}));
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-14));
    const double h = 1.0 / std::sqrt(2.0);
    Vector v(2);
    v << h, h;
    CHECK(eigvec_error(eig.vectors[1], v) <= 1e-14);
}

TEST_CASE("reconstruction and trace on Moler matrices") {
    for (Index n = 2; n <= 50; ++n) {
        CAPTURE(n);
        const auto m = moler_matrix(n);
        const auto eig = jacobi_eigen(m);
        double sum = 0.0;
        double worst = 0.0;
        for (std::size_t k = 0; k < eig.values.size(); ++k) {
            sum += eig.values[k];
            const Vector r = m.multiply(eig.vectors[k]) - eig.values[k] * eig.vectors[k];
            worst = std::max(worst, r.cwiseAbs().maxCoeff());
            if (k > 0) CHECK(eig.values[k - 1] <= eig.values[k]);
        }
        CHECK(std::abs(sum - m.trace()) <= 1e-10 * m.max_abs() * double(n));
        CHECK(worst <= 1e-10 * m.max_abs() * double(n));
    }
}

TEST_CASE("sweep limit") {
    CHECK_THROWS_AS(jacobi_eigen(moler_matrix(30), 1e-14, 1), NonConvergence);
}

TEST_CASE("eigvec_error") {
    Vector x(3);
    x << 1, 2, 2;
    CHECK(eigvec_error(-3.0 * x, x) <= 1e-15);
    CHECK_THROWS_AS(eigvec_error(Vector::Zero(3), x), DegenerateInput);
    CHECK_THROWS_AS(eigvec_error(Vector::Ones(2), x), InvalidArgument);
}
