#include "sumscale/types.hpp"

#include <doctest.h>

using namespace sumscale;

TEST_CASE("symmetric matrix construction") {
    const auto m = SymmetricMatrix::from_rows({{2, 1}, {1, 2}});
    CHECK(m.order() == 2);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 0) == 1.0);
    CHECK(m.trace() == 4.0);
    CHECK_THROWS_AS(SymmetricMatrix::from_rows({{1, 2}, {3, 4}}), InvalidArgument);
    CHECK_THROWS_AS(SymmetricMatrix::from_rows({{1, 2}}), InvalidArgument);
}

TEST_CASE("set writes both triangles") {
    SymmetricMatrix m(3);
    m.set(0, 2, 5.0);
    CHECK(m(2, 0) == 5.0);
    CHECK(m(0, 2) == 5.0);
}

TEST_CASE("products") {
    const auto d = SymmetricMatrix::diagonal({3, 1, 2});
    Vector x(3);
    x << 1, 2, 3;
    const Vector y = d.multiply(x);
    CHECK(y[0] == 3.0);
    CHECK(y[1] == 2.0);
    CHECK(y[2] == 6.0);
    CHECK(d.quadratic_form(x) == doctest::Approx(3 + 4 + 18));
    CHECK(d.negated()(0, 0) == -3.0);
    CHECK(d.max_abs() == 3.0);
    CHECK(SymmetricMatrix::identity(4).trace() == 4.0);
}

TEST_CASE("canonical mode names round-trip") {
    for (auto mode : {CanonicalMode::none, CanonicalMode::sum_scale, CanonicalMode::sphere_signed}) {
        CHECK(canonical_mode_from_string(to_string(mode)) == mode);
    }
    CHECK_THROWS_AS(canonical_mode_from_string("bogus"), InvalidArgument);
}
