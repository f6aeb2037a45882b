#pragma once

#include "voidwave/core.hpp"
#include "voidwave/grid.hpp"
#include "voidwave/quadrature.hpp"

#include <functional>
#include <memory>

namespace voidwave {

// Natural cubic spline through strictly increasing abscissae (zero second
// derivative at both ends). Evaluation outside the data range clamps to
// the nearest endpoint ordinate.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<Real> xs, std::vector<Real> ys);

    Real operator()(Real x) const;
    Real second_derivative(Real x) const;

    const std::vector<Real>& abscissae() const { return xs_; }
    const std::vector<Real>& ordinates() const { return ys_; }

private:
    std::vector<Real> xs_, ys_;
    std::vector<Real> d2_; // second derivatives at the knots
};

CubicSpline build_spline(const std::vector<Vec2>& points);

// Implicit description of the void set: primitives combined by
// union/intersection/complement. signed_value() is negative inside a
// void, positive in intact material; points within 1e-12 of the boundary
// count as physical (voids are open sets).
class ImplicitGeometry {
public:
    ImplicitGeometry() = default; // empty set: no void anywhere

    static ImplicitGeometry circle(Vec2 center, Real radius);
    // Rotated ellipse; membership through the normalized quadratic form.
    static ImplicitGeometry ellipse(Vec2 center, Real semi_x, Real semi_y,
                                    Real rotation_deg);
    static ImplicitGeometry box(Vec2 lo, Vec2 hi);
    static ImplicitGeometry interval(Real lo, Real hi); // 1D void segment
    // Void below the curve: material lies above it.
    static ImplicitGeometry below_spline(CubicSpline spline);

    static ImplicitGeometry join(ImplicitGeometry a, ImplicitGeometry b);
    static ImplicitGeometry intersect(ImplicitGeometry a, ImplicitGeometry b);
    static ImplicitGeometry complement(ImplicitGeometry a);

    bool empty() const { return root_ == nullptr; }

    // Negative inside the void set, positive outside; +inf for the empty set.
    Real signed_value(const Vec2& point) const;

    bool is_void(const Vec2& point) const { return signed_value(point) < -boundary_tol; }
    bool is_physical(const Vec2& point) const { return !is_void(point); }

    static constexpr Real boundary_tol = 1e-12;

private:
    struct Node;
    explicit ImplicitGeometry(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

// FCM indicator: alpha_phys in intact material, alpha_fict inside voids.
// alpha_fict = 0 is allowed here (pure geometry measures); assembling
// operators requires it to be positive.
struct IndicatorField {
    ImplicitGeometry geometry;
    Real alpha_phys = 1.0;
    Real alpha_fict = 1e-3;
};

Real evaluate_indicator(const IndicatorField& indicator, const Vec2& point);

enum class CellClass { fully_inside, fully_outside, cut };

// Classifies an axis-aligned cell against the void geometry using probe
// points (corners, center, edge midpoints): fully_inside = all physical,
// fully_outside = all void, cut = probes disagree.
CellClass classify_cell(const ImplicitGeometry& geometry, const Vec2& lo,
                        const Vec2& hi, int dimension);
CellClass classify_element(const ImplicitGeometry& geometry, const Grid& grid,
                           Index element);

// One integration point of a cut element. Material factors that are
// piecewise constant in space (alpha, geometry-driven gamma) must be
// evaluated at eval_position: the owning leaf's center, or, for leaves
// still cut at maximum depth, a probe point on the void side. That choice
// makes refined void areas grow monotonically toward the exact value.
struct CutPoint {
    Vec2 position;      // quadrature point in physical space
    Real weight;        // physical-measure weight
    Vec2 eval_position; // representative point for piecewise factors
    Real alpha;         // indicator value at eval_position
};

struct ComposedQuadrature {
    std::vector<CutPoint> points;
    int depth = 0;

    Real weight_sum() const;
    Real alpha_weighted_sum() const; // integral of alpha over the element
};

// Recursively splits a cut element on a binary tree (1D) / quadtree (2D)
// until sub-cells are uncut or `depth` is reached, then places the scaled
// base rule on every leaf. The classification geometry drives the
// subdivision; `indicator` supplies the stored alpha values. Uncut
// elements return the base rule over the whole element.
ComposedQuadrature build_composed_quadrature(const ImplicitGeometry& classify_geometry,
                                             const IndicatorField& indicator,
                                             const Grid& grid, Index element,
                                             int depth, const QuadratureRule& base_rule);
ComposedQuadrature build_composed_quadrature(const IndicatorField& indicator,
                                             const Grid& grid, Index element,
                                             int depth, const QuadratureRule& base_rule);

} // namespace voidwave
