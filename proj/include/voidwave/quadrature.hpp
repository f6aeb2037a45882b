#pragma once

#include "voidwave/core.hpp"

namespace voidwave {

// One-dimensional quadrature rule on the reference interval [-1, 1].
struct QuadratureRule {
    std::vector<Real> points;
    std::vector<Real> weights;

    std::size_t size() const { return points.size(); }
};

// Gauss-Legendre rule with n points (exact for polynomials of degree 2n-1).
QuadratureRule gauss_legendre(int n);

// Gauss-Lobatto-Legendre rule with n >= 2 points, endpoints included
// (exact for polynomials of degree 2n-3). Its points double as the
// Lagrange node layout for high-order elements.
QuadratureRule gauss_lobatto(int n);

} // namespace voidwave
