#pragma once

#include "voidwave/geometry.hpp"
#include "voidwave/grid.hpp"
#include "voidwave/material.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <map>
#include <memory>

namespace voidwave {

using SparseMatrix = Eigen::SparseMatrix<Real>;

// How the mass operator is integrated on uncut elements:
//  - consistent: full N^T N blocks (Gauss quadrature) everywhere; robust
//    when nodal gamma coefficients hit the 0.0 bound, because neighbor
//    coupling keeps the effective mass of such nodes finite.
//  - spectral_uncut: nodal (Gauss-Lobatto) quadrature on uncut elements,
//    which diagonalizes their mass blocks; cut elements keep consistent
//    blocks. Piecewise-constant voids then cannot leak motion through
//    mass coupling into the void region, and stepping is much cheaper.
//  - automatic: consistent for nodal-gamma models, spectral_uncut for
//    geometry-driven gamma.
enum class MassScheme { automatic, consistent, spectral_uncut };

struct AssemblyOptions {
    int tree_depth = 5;
    MassScheme mass = MassScheme::automatic;
    std::vector<Index> dirichlet_nodes; // empty: homogeneous Neumann everywhere
};

// Global operators of the semi-discrete system M u_tt + K u = f.
struct SystemOperators {
    Index n = 0;
    SparseMatrix M;
    SparseMatrix K;
    std::vector<Index> dirichlet_nodes;

    Eigen::VectorXd solve_mass(const Eigen::VectorXd& rhs) const;

    std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> mass_solver;
};

using CutQuadratureMap = std::map<Index, ComposedQuadrature>;

// The geometry whose interfaces require composed integration: the
// a-priori indicator voids joined with the material's gamma voids (the
// latter only in geometry mode; nodal fields are smooth).
ImplicitGeometry interface_geometry(const MaterialModel& material,
                                    const IndicatorField& indicator);

// Composed quadratures for every element cut by interface_geometry().
CutQuadratureMap compute_cut_quadratures(const Grid& grid, const MaterialModel& material,
                                         const IndicatorField& indicator, int tree_depth);

SystemOperators assemble(const Grid& grid, const MaterialModel& material,
                         const IndicatorField& indicator, const CutQuadratureMap& cuts,
                         const AssemblyOptions& options = {});
SystemOperators assemble(const Grid& grid, const MaterialModel& material,
                         const IndicatorField& indicator,
                         const AssemblyOptions& options = {});

// Consistent point load: basis values of the owning element at the given
// position, zero elsewhere. Entries sum to 1.
Eigen::SparseVector<Real> point_load_vector(const Grid& grid, const Vec2& position);

} // namespace voidwave
