#include "voidwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace voidwave {

// ---------------------------------------------------------------------------
// Cubic spline
// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<Real> xs, std::vector<Real> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n)
        throw ConfigError("spline needs at least two points with matching ordinates");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs_[i] > xs_[i - 1]))
            throw ConfigError("spline abscissae must be strictly increasing");

    // Natural end conditions: solve the tridiagonal system for the second
    // derivatives at the knots (Thomas algorithm).
    d2_.assign(n, 0.0);
    if (n == 2) return;
    std::vector<Real> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Real hl = xs_[i] - xs_[i - 1];
        const Real hr = xs_[i + 1] - xs_[i];
        diag[i] = 2.0 * (hl + hr);
        upper[i] = hr;
        rhs[i] = 6.0 * ((ys_[i + 1] - ys_[i]) / hr - (ys_[i] - ys_[i - 1]) / hl);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const Real hl = xs_[i] - xs_[i - 1]; // sub-diagonal entry
        const Real m = hl / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        d2_[i] = (rhs[i] - upper[i] * d2_[i + 1]) / diag[i];
        if (i == 1) break;
    }
}

Real CubicSpline::operator()(Real x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const Real h = xs_[i + 1] - xs_[i];
    const Real a = (xs_[i + 1] - x) / h;
    const Real b = (x - xs_[i]) / h;
    return a * ys_[i] + b * ys_[i + 1] +
           ((a * a * a - a) * d2_[i] + (b * b * b - b) * d2_[i + 1]) * (h * h) / 6.0;
}

Real CubicSpline::second_derivative(Real x) const {
    if (x <= xs_.front()) return d2_.front();
    if (x >= xs_.back()) return d2_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const Real h = xs_[i + 1] - xs_[i];
    const Real a = (xs_[i + 1] - x) / h;
    const Real b = (x - xs_[i]) / h;
    return a * d2_[i] + b * d2_[i + 1];
}

CubicSpline build_spline(const std::vector<Vec2>& points) {
    std::vector<Real> xs(points.size()), ys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
    return CubicSpline(std::move(xs), std::move(ys));
}

// ---------------------------------------------------------------------------
// Implicit geometry
// ---------------------------------------------------------------------------

struct ImplicitGeometry::Node {
    enum class Kind { circle, ellipse, box, spline_below, join, intersect, complement };
    Kind kind;

    Vec2 center{};
    Real radius = 0.0;
    Real semi_x = 0.0, semi_y = 0.0;
    Real cos_rot = 1.0, sin_rot = 0.0;
    Vec2 lo{}, hi{};
    CubicSpline spline;

    std::shared_ptr<const Node> a, b;

    Real signed_value(const Vec2& p) const {
        switch (kind) {
        case Kind::circle:
            return (p - center).norm() - radius;
        case Kind::ellipse: {
            const Vec2 d = p - center;
            const Real u = (cos_rot * d.x + sin_rot * d.y) / semi_x;
            const Real v = (-sin_rot * d.x + cos_rot * d.y) / semi_y;
            return u * u + v * v - 1.0; // monotone membership proxy
        }
        case Kind::box: {
            const Real sx = std::max(lo.x - p.x, p.x - hi.x);
            const Real sy = std::max(lo.y - p.y, p.y - hi.y);
            return std::max(sx, sy);
        }
        case Kind::spline_below:
            return p.y - spline(p.x);
        case Kind::join:
            return std::min(a->signed_value(p), b->signed_value(p));
        case Kind::intersect:
            return std::max(a->signed_value(p), b->signed_value(p));
        case Kind::complement:
            return -a->signed_value(p);
        }
        return std::numeric_limits<Real>::infinity();
    }
};

ImplicitGeometry ImplicitGeometry::circle(Vec2 center, Real radius) {
    if (radius <= 0.0) throw ConfigError("circle radius must be positive");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::circle;
    n->center = center;
    n->radius = radius;
    return ImplicitGeometry(std::move(n));
}

ImplicitGeometry ImplicitGeometry::ellipse(Vec2 center, Real semi_x, Real semi_y,
                                           Real rotation_deg) {
    if (semi_x <= 0.0 || semi_y <= 0.0)
        throw ConfigError("ellipse semi-axes must be positive");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::ellipse;
    n->center = center;
    n->semi_x = semi_x;
    n->semi_y = semi_y;
    const Real rad = rotation_deg * M_PI / 180.0;
    n->cos_rot = std::cos(rad);
    n->sin_rot = std::sin(rad);
    return ImplicitGeometry(std::move(n));
}

ImplicitGeometry ImplicitGeometry::box(Vec2 lo, Vec2 hi) {
    if (!(hi.x > lo.x) || !(hi.y > lo.y))
        throw ConfigError("box corners must satisfy lo < hi");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::box;
    n->lo = lo;
    n->hi = hi;
    return ImplicitGeometry(std::move(n));
}

ImplicitGeometry ImplicitGeometry::interval(Real lo, Real hi) {
    // 1D void segment embedded in the (x, y) query space.
    return box({lo, -1e30}, {hi, 1e30});
}

ImplicitGeometry ImplicitGeometry::below_spline(CubicSpline spline) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::spline_below;
    n->spline = std::move(spline);
    return ImplicitGeometry(std::move(n));
}

ImplicitGeometry ImplicitGeometry::join(ImplicitGeometry a, ImplicitGeometry b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::join;
    n->a = std::move(a.root_);
    n->b = std::move(b.root_);
    return ImplicitGeometry(std::move(n));
}

ImplicitGeometry ImplicitGeometry::intersect(ImplicitGeometry a, ImplicitGeometry b) {
    if (a.empty() || b.empty()) return ImplicitGeometry(); // empty void set
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::intersect;
    n->a = std::move(a.root_);
    n->b = std::move(b.root_);
    return ImplicitGeometry(std::move(n));
}

ImplicitGeometry ImplicitGeometry::complement(ImplicitGeometry a) {
    if (a.empty())
        throw ConfigError("complement of the empty void set is unbounded; "
                          "combine it with a bounding primitive instead");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::complement;
    n->a = std::move(a.root_);
    return ImplicitGeometry(std::move(n));
}

Real ImplicitGeometry::signed_value(const Vec2& point) const {
    if (!root_) return std::numeric_limits<Real>::infinity();
    return root_->signed_value(point);
}

// ---------------------------------------------------------------------------
// Indicator and classification
// ---------------------------------------------------------------------------

Real evaluate_indicator(const IndicatorField& indicator, const Vec2& point) {
    return indicator.geometry.is_void(point) ? indicator.alpha_fict
                                             : indicator.alpha_phys;
}

namespace {

// Probe points of an axis-aligned cell: corners + center + edge midpoints.
int cell_probes(const Vec2& lo, const Vec2& hi, int dimension, Vec2 out[9]) {
    const Real cx = 0.5 * (lo.x + hi.x);
    if (dimension == 1) {
        out[0] = {lo.x, 0.0};
        out[1] = {hi.x, 0.0};
        out[2] = {cx, 0.0};
        return 3;
    }
    const Real cy = 0.5 * (lo.y + hi.y);
    out[0] = {lo.x, lo.y};
    out[1] = {hi.x, lo.y};
    out[2] = {lo.x, hi.y};
    out[3] = {hi.x, hi.y};
    out[4] = {cx, cy};
    out[5] = {cx, lo.y};
    out[6] = {cx, hi.y};
    out[7] = {lo.x, cy};
    out[8] = {hi.x, cy};
    return 9;
}

} // namespace

CellClass classify_cell(const ImplicitGeometry& geometry, const Vec2& lo,
                        const Vec2& hi, int dimension) {
    if (geometry.empty()) return CellClass::fully_inside;
    Vec2 probes[9];
    const int n = cell_probes(lo, hi, dimension, probes);
    int voids = 0;
    for (int i = 0; i < n; ++i)
        if (geometry.is_void(probes[i])) ++voids;
    if (voids == 0) return CellClass::fully_inside;
    if (voids == n) return CellClass::fully_outside;
    return CellClass::cut;
}

CellClass classify_element(const ImplicitGeometry& geometry, const Grid& grid,
                           Index element) {
    const Vec2 lo = grid.element_origin(element);
    const Vec2 hi{lo.x + grid.hx, grid.dimension == 2 ? lo.y + grid.hy : 0.0};
    return classify_cell(geometry, lo, hi, grid.dimension);
}

// ---------------------------------------------------------------------------
// Composed quadrature
// ---------------------------------------------------------------------------

Real ComposedQuadrature::weight_sum() const {
    Real s = 0.0;
    for (const auto& p : points) s += p.weight;
    return s;
}

Real ComposedQuadrature::alpha_weighted_sum() const {
    Real s = 0.0;
    for (const auto& p : points) s += p.weight * p.alpha;
    return s;
}

namespace {

struct LeafEmitter {
    const ImplicitGeometry* classify;
    const IndicatorField* indicator;
    const QuadratureRule* base;
    int dimension;
    int max_depth;
    ComposedQuadrature* out;

    // Representative point for piecewise-constant material factors: the
    // leaf center, unless the leaf is still cut at maximum depth — then
    // the probe deepest inside the void, so unresolved slivers count as
    // void and refinement can only add physical volume.
    Vec2 representative(const Vec2& lo, const Vec2& hi, bool still_cut) const {
        const Vec2 center{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
        if (!still_cut) return center;
        Vec2 probes[9];
        const int n = cell_probes(lo, hi, dimension, probes);
        Vec2 best = center;
        Real best_value = classify->signed_value(center);
        for (int i = 0; i < n; ++i) {
            const Real v = classify->signed_value(probes[i]);
            if (v < best_value) {
                best_value = v;
                best = probes[i];
            }
        }
        return best;
    }

    void emit(const Vec2& lo, const Vec2& hi, bool still_cut) const {
        const Vec2 rep = representative(lo, hi, still_cut);
        const Real alpha = evaluate_indicator(*indicator, rep);
        const Real jx = 0.5 * (hi.x - lo.x);
        if (dimension == 1) {
            for (std::size_t q = 0; q < base->size(); ++q) {
                const Real x = lo.x + (base->points[q] + 1.0) * jx;
                out->points.push_back({{x, 0.0}, base->weights[q] * jx, rep, alpha});
            }
            return;
        }
        const Real jy = 0.5 * (hi.y - lo.y);
        for (std::size_t qy = 0; qy < base->size(); ++qy) {
            const Real y = lo.y + (base->points[qy] + 1.0) * jy;
            for (std::size_t qx = 0; qx < base->size(); ++qx) {
                const Real x = lo.x + (base->points[qx] + 1.0) * jx;
                out->points.push_back(
                    {{x, y}, base->weights[qx] * base->weights[qy] * jx * jy, rep, alpha});
            }
        }
    }

    void descend(const Vec2& lo, const Vec2& hi, int depth) const {
        const CellClass cls = classify_cell(*classify, lo, hi, dimension);
        if (cls != CellClass::cut) {
            emit(lo, hi, false);
            return;
        }
        if (depth >= max_depth) {
            emit(lo, hi, true);
            return;
        }
        const Real cx = 0.5 * (lo.x + hi.x);
        if (dimension == 1) {
            descend(lo, {cx, 0.0}, depth + 1);
            descend({cx, 0.0}, hi, depth + 1);
            return;
        }
        const Real cy = 0.5 * (lo.y + hi.y);
        descend(lo, {cx, cy}, depth + 1);
        descend({cx, lo.y}, {hi.x, cy}, depth + 1);
        descend({lo.x, cy}, {cx, hi.y}, depth + 1);
        descend({cx, cy}, hi, depth + 1);
    }
};

} // namespace

ComposedQuadrature build_composed_quadrature(const ImplicitGeometry& classify_geometry,
                                             const IndicatorField& indicator,
                                             const Grid& grid, Index element,
                                             int depth, const QuadratureRule& base_rule) {
    if (depth < 0) throw ConfigError("composed quadrature depth must be >= 0");
    ComposedQuadrature cq;
    cq.depth = depth;
    const Vec2 lo = grid.element_origin(element);
    const Vec2 hi{lo.x + grid.hx, grid.dimension == 2 ? lo.y + grid.hy : 0.0};
    LeafEmitter emitter{&classify_geometry, &indicator, &base_rule,
                        grid.dimension, depth, &cq};
    emitter.descend(lo, hi, 0);
    return cq;
}

ComposedQuadrature build_composed_quadrature(const IndicatorField& indicator,
                                             const Grid& grid, Index element,
                                             int depth, const QuadratureRule& base_rule) {
    return build_composed_quadrature(indicator.geometry, indicator, grid, element,
                                     depth, base_rule);
}

} // namespace voidwave
