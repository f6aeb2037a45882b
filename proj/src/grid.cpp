#include "voidwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace voidwave {

namespace {

// Lagrange basis values and derivatives on the node set `nodes`,
// via the direct product formula (exact at nodes, O(p^2) for our p <= 8).
void lagrange_1d(const std::vector<Real>& nodes, Real xi,
                 std::vector<Real>& values, std::vector<Real>& derivs) {
    const std::size_t n = nodes.size();
    values.assign(n, 1.0);
    derivs.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            values[k] *= (xi - nodes[j]) / (nodes[k] - nodes[j]);
        }
        for (std::size_t m = 0; m < n; ++m) {
            if (m == k) continue;
            Real term = 1.0 / (nodes[k] - nodes[m]);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == k || j == m) continue;
                term *= (xi - nodes[j]) / (nodes[k] - nodes[j]);
            }
            derivs[k] += term;
        }
    }
}

Index axis_element_count(Real extent, Real h, const char* axis) {
    const Real ratio = extent / h;
    const auto n = static_cast<Index>(std::llround(ratio));
    if (n < 1 || std::abs(n * h - extent) > 1e-9 * std::abs(extent)) {
        std::ostringstream msg;
        msg << "grid extent " << extent << " along " << axis
            << " is not an integer multiple of element size " << h;
        throw ConfigError(msg.str());
    }
    return n;
}

std::vector<Real> axis_lattice(Real origin, Real h, Index elems,
                               const std::vector<Real>& ref_nodes) {
    const int p = static_cast<int>(ref_nodes.size()) - 1;
    std::vector<Real> axis(static_cast<std::size_t>(p) * elems + 1);
    for (Index e = 0; e < elems; ++e) {
        const Real left = origin + e * h;
        for (int k = 0; k <= p; ++k)
            axis[e * p + k] = left + 0.5 * (ref_nodes[k] + 1.0) * h;
    }
    // Shared interfaces must coincide exactly for watertight connectivity.
    for (Index e = 1; e < elems; ++e)
        axis[e * static_cast<Index>(p)] = origin + e * h;
    axis.back() = origin + elems * h;
    return axis;
}

// Splits a physical coordinate into (element index, reference coordinate)
// along one axis; interface points go to the lower element.
void locate_axis(Real x, Real origin, Real h, Index elems, const char* axis,
                 Index& elem, Real& xi) {
    const Real tol = 1e-10 * h;
    if (x < origin - tol || x > origin + elems * h + tol) {
        std::ostringstream msg;
        msg << "point coordinate " << x << " outside domain along " << axis;
        throw ConfigError(msg.str());
    }
    const Real s = (x - origin) / h;
    elem = std::clamp(static_cast<Index>(std::floor(s)), Index{0}, elems - 1);
    // snap interface points (within tolerance) to the lower neighbor
    if (elem > 0 && x - (origin + elem * h) <= tol) --elem;
    xi = 2.0 * (x - (origin + elem * h)) / h - 1.0;
    xi = std::clamp(xi, -1.0, 1.0);
}

} // namespace

int Grid::nodes_per_element() const {
    const int n = degree + 1;
    return dimension == 2 ? n * n : n;
}

void Grid::element_nodes(Index element, std::vector<Index>& out) const {
    const int p = degree;
    out.resize(nodes_per_element());
    if (dimension == 1) {
        for (int k = 0; k <= p; ++k) out[k] = element * p + k;
        return;
    }
    const Index ex = element % elems_x;
    const Index ey = element / elems_x;
    const Index nnx = nodes_x();
    int local = 0;
    for (int ky = 0; ky <= p; ++ky)
        for (int kx = 0; kx <= p; ++kx)
            out[local++] = (ey * p + ky) * nnx + (ex * p + kx);
}

Vec2 Grid::node_position(Index node) const {
    if (dimension == 1) return {axis_x[node], 0.0};
    const Index nnx = nodes_x();
    return {axis_x[node % nnx], axis_y[node / nnx]};
}

Vec2 Grid::element_origin(Index element) const {
    if (dimension == 1) return {origin.x + (element % elems_x) * hx, 0.0};
    return {origin.x + (element % elems_x) * hx, origin.y + (element / elems_x) * hy};
}

Vec2 Grid::element_center(Index element) const {
    const Vec2 lo = element_origin(element);
    return {lo.x + 0.5 * hx, dimension == 2 ? lo.y + 0.5 * hy : 0.0};
}

Vec2 Grid::reference_to_physical(Index element, const Vec2& ref) const {
    const Vec2 lo = element_origin(element);
    return {lo.x + 0.5 * (ref.x + 1.0) * hx,
            dimension == 2 ? lo.y + 0.5 * (ref.y + 1.0) * hy : 0.0};
}

Grid build_grid(int dimension, Vec2 extents, Vec2 element_size, int degree, Vec2 origin) {
    if (dimension != 1 && dimension != 2)
        throw ConfigError("grid dimension must be 1 or 2");
    if (degree < 1 || degree > 8)
        throw ConfigError("polynomial degree must be between 1 and 8");
    if (extents.x <= 0.0 || element_size.x <= 0.0 ||
        (dimension == 2 && (extents.y <= 0.0 || element_size.y <= 0.0)))
        throw ConfigError("grid extents and element sizes must be positive");

    Grid g;
    g.dimension = dimension;
    g.degree = degree;
    g.origin = origin;
    g.extent = extents;
    g.hx = element_size.x;
    g.elems_x = axis_element_count(extents.x, element_size.x, "x");
    g.ref_nodes = gauss_lobatto(degree + 1).points;
    g.axis_x = axis_lattice(origin.x, g.hx, g.elems_x, g.ref_nodes);
    if (dimension == 2) {
        g.hy = element_size.y;
        g.elems_y = axis_element_count(extents.y, element_size.y, "y");
        g.axis_y = axis_lattice(origin.y, g.hy, g.elems_y, g.ref_nodes);
    }
    return g;
}

Grid build_grid_1d(Real length, Real element_size, int degree) {
    return build_grid(1, {length, 0.0}, {element_size, 0.0}, degree);
}

BasisEval evaluate_basis(const Grid& grid, Index element, const Vec2& reference_point) {
    const Real tol = 1e-12;
    if (reference_point.x < -1.0 - tol || reference_point.x > 1.0 + tol ||
        (grid.dimension == 2 &&
         (reference_point.y < -1.0 - tol || reference_point.y > 1.0 + tol)))
        throw ConfigError("reference point outside the reference element");
    (void)element; // all elements share the reference basis

    std::vector<Real> vx, dx;
    lagrange_1d(grid.ref_nodes, reference_point.x, vx, dx);

    BasisEval eval;
    if (grid.dimension == 1) {
        eval.values = vx;
        eval.gradients.resize(vx.size());
        for (std::size_t k = 0; k < vx.size(); ++k) eval.gradients[k] = {dx[k], 0.0};
        return eval;
    }

    std::vector<Real> vy, dy;
    lagrange_1d(grid.ref_nodes, reference_point.y, vy, dy);
    const std::size_t n = vx.size();
    eval.values.resize(n * n);
    eval.gradients.resize(n * n);
    std::size_t local = 0;
    for (std::size_t ky = 0; ky < n; ++ky) {
        for (std::size_t kx = 0; kx < n; ++kx, ++local) {
            eval.values[local] = vx[kx] * vy[ky];
            eval.gradients[local] = {dx[kx] * vy[ky], vx[kx] * dy[ky]};
        }
    }
    return eval;
}

PointLocation locate_point(const Grid& grid, const Vec2& physical_point) {
    PointLocation loc;
    Index ex = 0, ey = 0;
    Real xi = 0.0, eta = 0.0;
    locate_axis(physical_point.x, grid.origin.x, grid.hx, grid.elems_x, "x", ex, xi);
    if (grid.dimension == 2)
        locate_axis(physical_point.y, grid.origin.y, grid.hy, grid.elems_y, "y", ey, eta);
    loc.element = grid.dimension == 2 ? ey * grid.elems_x + ex : ex;
    loc.reference = {xi, eta};
    return loc;
}

} // namespace voidwave
