#pragma once

// Internal helpers shared by operator assembly and kernel accumulation.
// The gradient kernels must integrate with exactly the quadrature layout
// used to build M and K, otherwise adjoint and finite-difference
// derivatives of the discrete objective drift apart.

#include "voidwave/grid.hpp"
#include "voidwave/material.hpp"
#include "voidwave/quadrature.hpp"

#include <vector>

namespace voidwave::detail {

struct QuadTable {
    std::vector<Vec2> ref_points;
    std::vector<Real> ref_weights; // reference-measure weights
    std::vector<std::vector<Real>> N;
    std::vector<std::vector<Vec2>> dN; // reference-coordinate gradients
};

// Tensorizes a 1D rule over the reference element and tabulates the basis.
inline QuadTable tensor_table(const Grid& grid, const QuadratureRule& line_rule) {
    QuadTable t;
    if (grid.dimension == 1) {
        for (std::size_t q = 0; q < line_rule.size(); ++q) {
            t.ref_points.push_back({line_rule.points[q], 0.0});
            t.ref_weights.push_back(line_rule.weights[q]);
        }
    } else {
        for (std::size_t qy = 0; qy < line_rule.size(); ++qy)
            for (std::size_t qx = 0; qx < line_rule.size(); ++qx) {
                t.ref_points.push_back({line_rule.points[qx], line_rule.points[qy]});
                t.ref_weights.push_back(line_rule.weights[qx] * line_rule.weights[qy]);
            }
    }
    for (const Vec2& p : t.ref_points) {
        BasisEval eval = evaluate_basis(grid, 0, p);
        t.N.push_back(std::move(eval.values));
        t.dN.push_back(std::move(eval.gradients));
    }
    return t;
}

// Element-local nodes as quadrature points (Gauss-Lobatto weights). Basis
// values there are Kronecker deltas, which makes the mass contribution of
// uncut elements diagonal.
inline QuadTable nodal_table(const Grid& grid) {
    return tensor_table(grid, gauss_lobatto(grid.degree + 1));
}

// gamma value(s) at one quadrature point: interpolated through the basis
// in nodal mode, piecewise constant from the void geometry otherwise.
struct GammaValues {
    Real g1 = 1.0;
    Real g2 = 1.0;
};

inline GammaValues gamma_at(const MaterialModel& m, const std::vector<Index>& nodes,
                            const std::vector<Real>& N, const Vec2& piecewise_position) {
    GammaValues g;
    if (m.nodal_mode()) {
        if (m.tag == Scaling::separate) {
            Real gr = 0.0, gc = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                gr += N[i] * m.gamma_rho->coeffs[nodes[i]];
                gc += N[i] * m.gamma_c->coeffs[nodes[i]];
            }
            g.g1 = gr;
            g.g2 = gc;
        } else {
            Real gv = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                gv += N[i] * m.gamma->coeffs[nodes[i]];
            g.g1 = gv;
        }
    } else if (!m.gamma_geometry.empty() && m.gamma_geometry.is_void(piecewise_position)) {
        g.g1 = g.g2 = m.gamma_void;
    }
    return g;
}

} // namespace voidwave::detail
