#include "voidwave/quadrature.hpp"

#include "doctest.h"

#include <cmath>

using namespace voidwave;

namespace {

// integral of x^k over [-1, 1]
Real monomial_integral(int k) {
    return (k % 2 == 1) ? 0.0 : 2.0 / static_cast<Real>(k + 1);
}

Real apply(const QuadratureRule& rule, int k) {
    Real sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        sum += rule.weights[q] * std::pow(rule.points[q], k);
    }
    return sum;
}

} // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials up to degree 2n-1") {
    for (int n = 1; n <= 8; ++n) {
        const QuadratureRule rule = gauss_legendre(n);
        REQUIRE(rule.size() == static_cast<std::size_t>(n));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            CHECK(apply(rule, k) == doctest::Approx(monomial_integral(k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Gauss-Lobatto rules include the endpoints and integrate degree 2n-3") {
    for (int n = 2; n <= 8; ++n) {
        const QuadratureRule rule = gauss_lobatto(n);
        REQUIRE(rule.size() == static_cast<std::size_t>(n));
        CHECK(rule.points.front() == doctest::Approx(-1.0));
        CHECK(rule.points.back() == doctest::Approx(1.0));
        for (int k = 0; k <= 2 * n - 3; ++k) {
            CHECK(apply(rule, k) == doctest::Approx(monomial_integral(k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("low-order rules match their closed forms") {
    const QuadratureRule gl2 = gauss_legendre(2);
    CHECK(gl2.points[0] == doctest::Approx(-1.0 / std::sqrt(3.0)));
    CHECK(gl2.points[1] == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(gl2.weights[0] == doctest::Approx(1.0));

    const QuadratureRule glb2 = gauss_lobatto(2); // trapezoid
    CHECK(glb2.weights[0] == doctest::Approx(1.0));
    CHECK(glb2.weights[1] == doctest::Approx(1.0));

    const QuadratureRule glb3 = gauss_lobatto(3); // Simpson
    CHECK(glb3.points[1] == doctest::Approx(0.0));
    CHECK(glb3.weights[0] == doctest::Approx(1.0 / 3.0));
    CHECK(glb3.weights[1] == doctest::Approx(4.0 / 3.0));
}
