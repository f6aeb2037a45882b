#pragma once

#include "voidwave/core.hpp"
#include "voidwave/quadrature.hpp"

namespace voidwave {

// Structured 1D/2D mesh with tensor-product Lagrange elements of degree p.
// Element-local nodes use Gauss-Lobatto points per axis, so high-order
// bases stay well conditioned and nodal quadrature diagonalizes the mass
// contribution of uncut elements.
//
// Numbering: nodes form a lattice of (p*elems_x+1) x (p*elems_y+1) points,
// node id = iy * nodes_x + ix; element id = ey * elems_x + ex; the local
// node (kx, ky) of an element maps to lattice point
// (ex*p + kx, ey*p + ky).
struct Grid {
    int dimension = 1;
    int degree = 1;
    Vec2 origin{0.0, 0.0};
    Vec2 extent{0.0, 0.0}; // extent.y unused in 1D
    Index elems_x = 0;
    Index elems_y = 0; // 0 in 1D
    Real hx = 0.0;
    Real hy = 0.0; // 0 in 1D

    std::vector<Real> ref_nodes; // element-local node coordinates on [-1,1]
    std::vector<Real> axis_x;    // lattice coordinates along x
    std::vector<Real> axis_y;    // lattice coordinates along y (empty in 1D)

    Index nodes_x() const { return static_cast<Index>(axis_x.size()); }
    Index nodes_y() const { return dimension == 2 ? static_cast<Index>(axis_y.size()) : 1; }
    Index node_count() const { return nodes_x() * nodes_y(); }
    Index element_count() const { return dimension == 2 ? elems_x * elems_y : elems_x; }
    int nodes_per_element() const;

    // Global node ids of one element, in local (kx fastest) order.
    void element_nodes(Index element, std::vector<Index>& out) const;

    // Physical coordinates of a global node.
    Vec2 node_position(Index node) const;

    // Physical coordinates of an element's center and lower corner.
    Vec2 element_center(Index element) const;
    Vec2 element_origin(Index element) const;

    // Affine map between the reference element [-1,1]^d and an element.
    Vec2 reference_to_physical(Index element, const Vec2& ref) const;
};

struct BasisEval {
    std::vector<Real> values;
    std::vector<Vec2> gradients; // w.r.t. reference coordinates; .y = 0 in 1D
};

// Builds a structured grid. extents must be integer multiples of
// element_size within 1e-9 relative tolerance.
Grid build_grid(int dimension, Vec2 extents, Vec2 element_size, int degree,
                Vec2 origin = Vec2{0.0, 0.0});
Grid build_grid_1d(Real length, Real element_size, int degree);

// Shape function values and reference-coordinate gradients at a point of
// the reference element. Values form a partition of unity; reference
// gradients sum to the zero vector.
BasisEval evaluate_basis(const Grid& grid, Index element, const Vec2& reference_point);

struct PointLocation {
    Index element = 0;
    Vec2 reference{0.0, 0.0};
};

// Finds the element owning a physical point and the point's reference
// coordinates within it. Points on element interfaces belong to the
// element with the lower index; points outside the domain throw.
PointLocation locate_point(const Grid& grid, const Vec2& physical_point);

} // namespace voidwave
