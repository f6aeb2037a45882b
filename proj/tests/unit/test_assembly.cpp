#include "voidwave/assembly.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

using namespace voidwave;

namespace {

MaterialModel unit_material() {
    MaterialModel model;
    model.rho0 = 1.0;
    model.c0 = 1.0;
    model.tag = Scaling::rho;
    return model;
}

Real max_abs_entry(const SparseMatrix& A) {
    Real max_abs = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
            max_abs = std::max(max_abs, std::abs(it.value()));
        }
    }
    return max_abs;
}

Real asymmetry(const SparseMatrix& A) {
    const SparseMatrix diff = SparseMatrix(A.transpose()) - A;
    return max_abs_entry(diff);
}

} // namespace

TEST_CASE("consistent mass of two linear 1D elements") {
    const Grid grid = build_grid_1d(2.0, 1.0, 1);
    AssemblyOptions options;
    options.mass = MassScheme::consistent;
    const SystemOperators ops = assemble(grid, unit_material(), {}, options);

    REQUIRE(ops.n == 3);
    const Eigen::VectorXd row_sums = ops.M * Eigen::VectorXd::Ones(3);
    CHECK(row_sums[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(row_sums[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(row_sums[2] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ops.M.coeff(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(ops.M.coeff(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("nodal quadrature diagonalizes the mass of uncut elements") {
    const Grid grid = build_grid_1d(2.0, 1.0, 1);
    AssemblyOptions options;
    options.mass = MassScheme::spectral_uncut;
    const SystemOperators ops = assemble(grid, unit_material(), {}, options);

    CHECK(ops.M.coeff(0, 1) == 0.0);
    const Eigen::VectorXd row_sums = ops.M * Eigen::VectorXd::Ones(3);
    CHECK(row_sums[0] == doctest::Approx(0.5).epsilon(1e-14)); // same integral of N_i
    CHECK(row_sums[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("stiffness of one linear element") {
    const Grid grid = build_grid_1d(1.0, 1.0, 1);
    const SystemOperators ops = assemble(grid, unit_material(), {});
    CHECK(ops.K.coeff(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ops.K.coeff(0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ops.K.coeff(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ops.K.coeff(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constant fields are stiffness-free, also on cut grids") {
    MaterialModel material = unit_material();
    const IndicatorField indicator{ImplicitGeometry::circle({0.025, 0.025}, 0.008), 1.0, 1e-3};
    const Grid grid = build_grid(2, {0.05, 0.05}, {0.0025, 0.0025}, 2);
    const SystemOperators ops = assemble(grid, material, indicator, AssemblyOptions{});

    const Eigen::VectorXd residual = ops.K * Eigen::VectorXd::Ones(ops.n);
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-12 * max_abs_entry(ops.K));
}

TEST_CASE("operators are symmetric") {
    MaterialModel material;
    material.tag = Scaling::rhoc;
    material.gamma_geometry = ImplicitGeometry::circle({0.025, 0.025}, 0.008);
    material.gamma_void = 1e-5;
    const IndicatorField indicator{{}, 1.0, 1e-3};
    const Grid grid = build_grid(2, {0.05, 0.05}, {0.0025, 0.0025}, 2);

    for (const MassScheme scheme : {MassScheme::consistent, MassScheme::spectral_uncut}) {
        AssemblyOptions options;
        options.mass = scheme;
        const SystemOperators ops = assemble(grid, material, indicator, options);
        CHECK(asymmetry(ops.M) < 1e-12 * max_abs_entry(ops.M));
        CHECK(asymmetry(ops.K) < 1e-12 * max_abs_entry(ops.K));
    }
}

TEST_CASE("mass solves round-trip") {
    const Grid grid = build_grid(2, {0.05, 0.05}, {0.005, 0.005}, 1);
    MaterialModel material = unit_material();
    material.gamma = uniform_field(grid, 0.8);
    const SystemOperators ops = assemble(grid, material, {}, AssemblyOptions{});

    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(ops.n, -1.0, 2.0);
    const Eigen::VectorXd recovered = ops.solve_mass(ops.M * x);
    CHECK((recovered - x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dirichlet nodes are decoupled and kept invertible") {
    const Grid grid = build_grid_1d(1.0, 1.0, 2);
    AssemblyOptions options;
    options.dirichlet_nodes = {0, 2};
    const SystemOperators ops = assemble(grid, unit_material(), {}, options);

    CHECK(ops.M.coeff(0, 0) == 1.0);
    CHECK(ops.M.coeff(0, 1) == 0.0);
    CHECK(ops.K.coeff(0, 1) == 0.0);
    CHECK(ops.K.coeff(1, 1) > 0.0);

    AssemblyOptions bad;
    bad.dirichlet_nodes = {99};
    CHECK_THROWS_AS(assemble(grid, unit_material(), {}, bad), ConfigError);
}

TEST_CASE("point loads are consistent with the basis") {
    const Grid grid = build_grid_1d(2.0, 1.0, 1);

    const Eigen::SparseVector<Real> at_node = point_load_vector(grid, {1.0, 0.0});
    CHECK(at_node.coeff(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(at_node.nonZeros() == 1);

    const Eigen::SparseVector<Real> midpoint = point_load_vector(grid, {0.5, 0.0});
    CHECK(midpoint.coeff(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(midpoint.coeff(1) == doctest::Approx(0.5).epsilon(1e-14));

    const Grid plate = build_grid(2, {0.05, 0.05}, {0.005, 0.005}, 4);
    const Eigen::SparseVector<Real> anywhere = point_load_vector(plate, {0.0131, 0.0377});
    Real sum = 0.0;
    for (Eigen::SparseVector<Real>::InnerIterator it(anywhere); it; ++it) {
        sum += it.value();
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interface geometry joins indicator and material voids") {
    MaterialModel material;
    material.gamma_geometry = ImplicitGeometry::circle({0.01, 0.01}, 0.004);
    const IndicatorField indicator{ImplicitGeometry::circle({0.03, 0.03}, 0.004), 1.0, 1e-3};

    const ImplicitGeometry combined = interface_geometry(material, indicator);
    CHECK(combined.is_void({0.01, 0.01}));
    CHECK(combined.is_void({0.03, 0.03}));
    CHECK(combined.is_physical({0.02, 0.04}));

    // Nodal fields are smooth: only the indicator voids need cut cells.
    MaterialModel nodal;
    const Grid grid = build_grid(2, {0.05, 0.05}, {0.005, 0.005}, 1);
    nodal.gamma = uniform_field(grid, 0.5);
    const ImplicitGeometry nodal_side = interface_geometry(nodal, indicator);
    CHECK(nodal_side.is_physical({0.01, 0.01}));
    CHECK(nodal_side.is_void({0.03, 0.03}));
}

TEST_CASE("cut quadratures cover exactly the cut elements") {
    const Grid grid = build_grid(2, {0.05, 0.05}, {0.0025, 0.0025}, 1);
    MaterialModel material = unit_material();
    const IndicatorField indicator{ImplicitGeometry::circle({0.025, 0.025}, 0.008), 1.0, 1e-3};

    const CutQuadratureMap cuts = compute_cut_quadratures(grid, material, indicator, 5);
    CHECK(!cuts.empty());
    for (Index e = 0; e < grid.element_count(); ++e) {
        const CellClass cls = classify_element(indicator.geometry, grid, e);
        CHECK((cuts.count(e) == 1) == (cls == CellClass::cut));
    }
    for (const auto& [element, quad] : cuts) {
        CHECK(quad.weight_sum() == doctest::Approx(grid.hx * grid.hy).epsilon(1e-12));
    }
}
