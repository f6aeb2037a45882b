#include "voidwave/geometry.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace voidwave;

namespace {

// Plate with a centered circular hole: 50 mm x 50 mm, r = 5 mm.
const Real kPlate = 0.05;
const Real kRadius = 0.005;

Grid plate_grid(Real element_size = 0.5e-3) {
    return build_grid(2, {kPlate, kPlate}, {element_size, element_size}, 1);
}

ImplicitGeometry plate_hole() {
    return ImplicitGeometry::circle({kPlate / 2, kPlate / 2}, kRadius);
}

// All nine interpolation points of the wavy bottom surface, in metres.
std::vector<Vec2> bottom_profile() {
    return {{0.000, 0.010}, {0.010, 0.001}, {0.025, 0.0075},
            {0.035, 0.002}, {0.050, 0.015}, {0.060, 0.003},
            {0.075, 0.012}, {0.090, 0.001}, {0.100, 0.010}};
}

Real alpha_area(const ImplicitGeometry& geometry, const Grid& grid, int depth,
                Real alpha_fict) {
    const IndicatorField indicator{geometry, 1.0, alpha_fict};
    const QuadratureRule base = gauss_legendre(grid.degree + 1);
    Real area = 0.0;
    for (Index e = 0; e < grid.element_count(); ++e) {
        area += build_composed_quadrature(indicator, grid, e, depth, base)
                    .alpha_weighted_sum();
    }
    return area;
}

} // namespace

TEST_CASE("element classification against the plate hole") {
    const Grid grid = plate_grid();
    const ImplicitGeometry hole = plate_hole();

    CHECK(classify_element(hole, grid, 0) == CellClass::fully_inside); // corner: physical

    const PointLocation boundary = locate_point(grid, {kPlate / 2 + kRadius, kPlate / 2});
    CHECK(classify_element(hole, grid, boundary.element) == CellClass::cut);

    const PointLocation center = locate_point(grid, {kPlate / 2, kPlate / 2});
    CHECK(classify_element(hole, grid, center.element) == CellClass::fully_outside);
}

TEST_CASE("classification is consistent with disagreeing probe points") {
    const Grid grid = plate_grid(2.5e-3);
    const ImplicitGeometry hole = plate_hole();
    for (Index e = 0; e < grid.element_count(); ++e) {
        const Vec2 lo = grid.element_origin(e);
        const Vec2 hi{lo.x + grid.hx, lo.y + grid.hy};
        const bool corner_void = hole.is_void(lo) || hole.is_void(hi) ||
                                 hole.is_void({lo.x, hi.y}) || hole.is_void({hi.x, lo.y});
        const bool center_void = hole.is_void(grid.element_center(e));
        if (corner_void != center_void) {
            CHECK(classify_element(hole, grid, e) == CellClass::cut);
        }
    }
}

TEST_CASE("composed quadrature partitions every element") {
    const Grid grid = plate_grid(2.5e-3);
    const IndicatorField indicator{plate_hole(), 1.0, 0.0};
    const QuadratureRule base = gauss_legendre(2);
    const Real element_area = grid.hx * grid.hy;
    for (Index e = 0; e < grid.element_count(); ++e) {
        for (const int depth : {0, 2, 5}) {
            const ComposedQuadrature quad =
                build_composed_quadrature(indicator, grid, e, depth, base);
            CHECK(quad.weight_sum() == doctest::Approx(element_area).epsilon(1e-12));
        }
    }
}

TEST_CASE("uncut elements keep the base rule") {
    const Grid grid = plate_grid();
    const IndicatorField indicator{plate_hole(), 1.0, 0.0};
    const QuadratureRule base = gauss_legendre(2);
    const ComposedQuadrature quad = build_composed_quadrature(indicator, grid, 0, 5, base);
    CHECK(quad.points.size() == base.size() * base.size());
    for (const CutPoint& point : quad.points) {
        CHECK(point.alpha == 1.0);
    }
}

TEST_CASE("alpha-weighted area converges monotonically to the exact hole area") {
    const Grid grid = plate_grid();
    const ImplicitGeometry hole = plate_hole();
    const Real exact = kPlate * kPlate - M_PI * kRadius * kRadius;

    const Real at_depth_5 = alpha_area(hole, grid, 5, 0.0);
    CHECK(std::abs(at_depth_5 - exact) / exact < 0.005);

    Real previous_error = -1.0;
    for (int depth = 2; depth <= 6; ++depth) {
        const Real error = std::abs(alpha_area(hole, grid, depth, 0.0) - exact);
        if (previous_error >= 0.0) {
            CHECK(error < previous_error);
        }
        previous_error = error;
    }
}

TEST_CASE("alpha-weighted ellipse area improves monotonically with depth") {
    const Grid grid = plate_grid(2.5e-3);
    const ImplicitGeometry ellipse =
        ImplicitGeometry::ellipse({kPlate / 2, kPlate / 2}, 0.008, 0.004, 30.0);
    const Real exact = kPlate * kPlate - M_PI * 0.008 * 0.004;
    // Cut leaves are attributed entirely to the void, so the physical area
    // is approached from below and refinement can only help.
    Real first_error = 0.0;
    Real previous_error = -1.0;
    for (int depth = 2; depth <= 6; ++depth) {
        const Real estimate = alpha_area(ellipse, grid, depth, 0.0);
        CHECK(estimate <= exact + 1e-12);
        const Real error = exact - estimate;
        if (previous_error >= 0.0) {
            CHECK(error <= previous_error);
        } else {
            first_error = error;
        }
        previous_error = error;
    }
    CHECK(previous_error < 0.25 * first_error);
}

TEST_CASE("indicator values of the a-priori immersed geometry") {
    const CubicSpline bottom = build_spline(bottom_profile());
    const ImplicitGeometry voids = ImplicitGeometry::join(
        ImplicitGeometry::below_spline(bottom), ImplicitGeometry::circle({0.035, 0.020}, 0.0075));
    const IndicatorField indicator{voids, 1.0, 1e-3};

    CHECK(evaluate_indicator(indicator, {0.035, 0.020}) == 1e-3); // inside the circle
    CHECK(evaluate_indicator(indicator, {0.050, 0.040}) == 1.0);  // intact material
    CHECK(evaluate_indicator(indicator, {0.010, 0.0005}) == 1e-3); // below the surface
}

TEST_CASE("natural cubic spline interpolates its points") {
    const CubicSpline spline = build_spline(bottom_profile());
    CHECK(spline(0.010) == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(spline(0.0) == doctest::Approx(0.010).epsilon(1e-12));
    CHECK(spline.second_derivative(0.0) == doctest::Approx(0.0));
    CHECK(spline.second_derivative(0.1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(build_spline({{0.0, 1.0}, {0.0, 2.0}}), ConfigError);
}

TEST_CASE("boundary points count as physical") {
    const ImplicitGeometry hole = plate_hole();
    CHECK(hole.is_physical({kPlate / 2 + kRadius, kPlate / 2}));
    CHECK(hole.is_void({kPlate / 2, kPlate / 2}));
    CHECK(hole.is_physical({0.0, 0.0}));
}

TEST_CASE("set algebra on implicit geometries") {
    const ImplicitGeometry left = ImplicitGeometry::box({0.0, 0.0}, {1.0, 1.0});
    const ImplicitGeometry right = ImplicitGeometry::box({0.5, 0.0}, {1.5, 1.0});

    const ImplicitGeometry both = ImplicitGeometry::join(left, right);
    CHECK(both.is_void({0.25, 0.5}));
    CHECK(both.is_void({1.25, 0.5}));
    CHECK(both.is_physical({1.75, 0.5}));

    const ImplicitGeometry overlap = ImplicitGeometry::intersect(left, right);
    CHECK(overlap.is_void({0.75, 0.5}));
    CHECK(overlap.is_physical({0.25, 0.5}));

    const ImplicitGeometry outside = ImplicitGeometry::complement(left);
    CHECK(outside.is_physical({0.25, 0.5}));
    CHECK(outside.is_void({1.75, 0.5}));

    const ImplicitGeometry empty;
    CHECK(empty.empty());
    CHECK(empty.is_physical({0.0, 0.0}));
    CHECK(!ImplicitGeometry::join(empty, left).empty());
    CHECK(ImplicitGeometry::intersect(empty, left).empty());
}

TEST_CASE("1D interval voids and interface subdivision") {
    const Grid grid = build_grid_1d(3.0, 0.05, 1);
    const ImplicitGeometry void_part = ImplicitGeometry::interval(2.0167, 3.0);
    const IndicatorField indicator{void_part, 1.0, 0.0};
    const QuadratureRule base = gauss_legendre(2);

    Real length = 0.0;
    for (Index e = 0; e < grid.element_count(); ++e) {
        length += build_composed_quadrature(indicator, grid, e, 20, base).alpha_weighted_sum();
    }
    CHECK(length == doctest::Approx(2.0167).epsilon(1e-6));
}
