#include "voidwave/grid.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

using namespace voidwave;

TEST_CASE("element and node counts of the standard meshes") {
    const Grid plate = build_grid(2, {0.1, 0.05}, {0.5e-3, 0.5e-3}, 1);
    CHECK(plate.element_count() == 20000);

    const Grid line = build_grid_1d(3.0, 0.05, 1);
    CHECK(line.element_count() == 60);
    CHECK(line.node_count() == 61);

    const Grid square = build_grid(2, {0.05, 0.05}, {0.5e-3, 0.5e-3}, 1);
    CHECK(square.element_count() == 10000);
}

TEST_CASE("extent must be an integer multiple of the element size") {
    CHECK_THROWS_AS(build_grid_1d(1.0, 0.3, 1), ConfigError);
}

TEST_CASE("linear basis values at reference points") {
    const Grid grid = build_grid_1d(1.0, 0.5, 1);

    const BasisEval left = evaluate_basis(grid, 0, {-1.0, 0.0});
    CHECK(left.values[0] == doctest::Approx(1.0));
    CHECK(left.values[1] == doctest::Approx(0.0));

    const BasisEval mid = evaluate_basis(grid, 0, {0.0, 0.0});
    CHECK(mid.values[0] == doctest::Approx(0.5));
    CHECK(mid.values[1] == doctest::Approx(0.5));
    CHECK(mid.gradients[0].x == doctest::Approx(-0.5));
    CHECK(mid.gradients[1].x == doctest::Approx(0.5));
}

TEST_CASE("partition of unity and zero gradient sum at random points") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<Real> unit(-1.0, 1.0);
    for (const int degree : {1, 2, 4}) {
        for (const int dimension : {1, 2}) {
            const Grid grid = dimension == 1
                                  ? build_grid_1d(1.0, 0.25, degree)
                                  : build_grid(2, {1.0, 0.5}, {0.25, 0.25}, degree);
            for (int trial = 0; trial < 100; ++trial) {
                const Vec2 ref{unit(rng), dimension == 2 ? unit(rng) : 0.0};
                const BasisEval basis = evaluate_basis(grid, 0, ref);
                Real value_sum = 0.0;
                Vec2 grad_sum{0.0, 0.0};
                for (std::size_t i = 0; i < basis.values.size(); ++i) {
                    value_sum += basis.values[i];
                    grad_sum.x += basis.gradients[i].x;
                    grad_sum.y += basis.gradients[i].y;
                }
                CHECK(value_sum == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(grad_sum.x == doctest::Approx(0.0).epsilon(1e-12));
                CHECK(grad_sum.y == doctest::Approx(0.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("nodal interpolation reproduces polynomials of the element degree") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<Real> unit(0.0, 1.0);
    for (const int degree : {1, 2, 4}) {
        const Grid grid = build_grid(2, {1.0, 1.0}, {0.5, 0.5}, degree);
        const auto poly = [degree](const Vec2& p) {
            Real v = 1.0;
            for (int k = 0; k < degree; ++k) v *= (p.x - 0.3 * k);
            return v + std::pow(p.y, degree);
        };
        std::vector<Index> nodes;
        for (int trial = 0; trial < 50; ++trial) {
            const Vec2 point{unit(rng), unit(rng)};
            const PointLocation loc = locate_point(grid, point);
            const BasisEval basis = evaluate_basis(grid, loc.element, loc.reference);
            grid.element_nodes(loc.element, nodes);
            Real interpolated = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                interpolated += basis.values[i] * poly(grid.node_position(nodes[i]));
            }
            CHECK(interpolated == doctest::Approx(poly(point)).epsilon(1e-10));
        }
    }
}

TEST_CASE("locate_point resolves an off-node probe into element coordinates") {
    const Grid grid = build_grid_1d(3.0, 0.05, 1);
    const PointLocation loc = locate_point(grid, {2.0167, 0.0});
    CHECK(loc.element == 40); // [2.0, 2.05]
    CHECK(loc.reference.x == doctest::Approx(-0.332).epsilon(1e-12));
}

TEST_CASE("locate_point tie-breaks and inverts the element map") {
    const Grid grid = build_grid(2, {1.0, 1.0}, {0.25, 0.25}, 2);

    const PointLocation corner = locate_point(grid, {0.0, 0.0});
    CHECK(corner.element == 0);
    CHECK(corner.reference.x == doctest::Approx(-1.0));
    CHECK(corner.reference.y == doctest::Approx(-1.0));

    // Element-interface points belong to the lower-index element.
    const PointLocation interface = locate_point(grid, {0.25, 0.1});
    CHECK(interface.element == 0);
    CHECK(interface.reference.x == doctest::Approx(1.0));

    std::mt19937 rng(3);
    std::uniform_real_distribution<Real> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec2 point{unit(rng), unit(rng)};
        const PointLocation loc = locate_point(grid, point);
        const Vec2 back = grid.reference_to_physical(loc.element, loc.reference);
        CHECK(std::abs(back.x - point.x) < 1e-10 * grid.hx);
        CHECK(std::abs(back.y - point.y) < 1e-10 * grid.hy);
    }

    CHECK_THROWS_AS(locate_point(grid, {1.5, 0.5}), ConfigError);
}
