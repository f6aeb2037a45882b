#include "voidwave/assembly.hpp"

#include "element_tables.hpp"

#include <cmath>

namespace voidwave {

using detail::QuadTable;

Eigen::VectorXd SystemOperators::solve_mass(const Eigen::VectorXd& rhs) const {
    return mass_solver->solve(rhs);
}

ImplicitGeometry interface_geometry(const MaterialModel& material,
                                    const IndicatorField& indicator) {
    ImplicitGeometry g = indicator.geometry;
    if (!material.nodal_mode())
        g = ImplicitGeometry::join(g, material.gamma_geometry);
    return g;
}

CutQuadratureMap compute_cut_quadratures(const Grid& grid, const MaterialModel& material,
                                         const IndicatorField& indicator, int tree_depth) {
    CutQuadratureMap cuts;
    const ImplicitGeometry interfaces = interface_geometry(material, indicator);
    if (interfaces.empty()) return cuts;
    const QuadratureRule base = gauss_legendre(grid.degree + 1);
    for (Index e = 0; e < grid.element_count(); ++e) {
        if (classify_element(interfaces, grid, e) != CellClass::cut) continue;
        cuts.emplace(e, build_composed_quadrature(interfaces, indicator, grid, e,
                                                  tree_depth, base));
    }
    return cuts;
}

namespace {

MassScheme resolve_mass_scheme(const MaterialModel& material, MassScheme requested) {
    if (requested != MassScheme::automatic) return requested;
    return material.nodal_mode() ? MassScheme::consistent : MassScheme::spectral_uncut;
}

} // namespace

SystemOperators assemble(const Grid& grid, const MaterialModel& material,
                         const IndicatorField& indicator, const CutQuadratureMap& cuts,
                         const AssemblyOptions& options) {
    material.validate(grid);
    if (indicator.alpha_fict <= 0.0)
        throw ConfigError("assembling operators requires alpha_fict > 0");
    const MassScheme scheme = resolve_mass_scheme(material, options.mass);

    const Index n = grid.node_count();
    const int npe = grid.nodes_per_element();
    const Real jac = grid.dimension == 2 ? 0.25 * grid.hx * grid.hy : 0.5 * grid.hx;
    const Real gx = 2.0 / grid.hx;
    const Real gy = grid.dimension == 2 ? 2.0 / grid.hy : 0.0;

    const QuadTable gauss = detail::tensor_table(grid, gauss_legendre(grid.degree + 1));
    const QuadTable nodal = detail::nodal_table(grid);

    std::vector<char> dirichlet(static_cast<std::size_t>(n), 0);
    for (Index d : options.dirichlet_nodes) {
        if (d < 0 || d >= n) throw ConfigError("dirichlet node index out of range");
        dirichlet[d] = 1;
    }

    std::vector<Eigen::Triplet<Real>> m_trips, k_trips;
    std::vector<Index> nodes;
    std::vector<Real> basis_values;
    std::vector<Vec2> basis_grads;

    auto add_mass = [&](Index i, Index j, Real v) {
        if (dirichlet[i] || dirichlet[j]) return;
        m_trips.emplace_back(i, j, v);
    };
    auto add_stiff = [&](Index i, Index j, Real v) {
        if (dirichlet[i] || dirichlet[j]) return;
        k_trips.emplace_back(i, j, v);
    };

    for (Index e = 0; e < grid.element_count(); ++e) {
        grid.element_nodes(e, nodes);
        const auto cut = cuts.find(e);

        if (cut == cuts.end()) {
            // Uncut element: Gauss rule for stiffness (and consistent mass),
            // nodal rule for spectral mass.
            for (std::size_t q = 0; q < gauss.ref_points.size(); ++q) {
                const Vec2 x = grid.reference_to_physical(e, gauss.ref_points[q]);
                const Real alpha = evaluate_indicator(indicator, x);
                const auto gv = detail::gamma_at(material, nodes, gauss.N[q], x);
                const Coefficients co = effective_coefficients(material, alpha, gv.g1, gv.g2);
                const Real w = gauss.ref_weights[q] * jac;
                for (int i = 0; i < npe; ++i) {
                    const Vec2 gi{gauss.dN[q][i].x * gx, gauss.dN[q][i].y * gy};
                    for (int j = 0; j < npe; ++j) {
                        const Vec2 gj{gauss.dN[q][j].x * gx, gauss.dN[q][j].y * gy};
                        add_stiff(nodes[i], nodes[j],
                                  w * co.stiffness * (gi.x * gj.x + gi.y * gj.y));
                        if (scheme == MassScheme::consistent)
                            add_mass(nodes[i], nodes[j],
                                     w * co.mass * gauss.N[q][i] * gauss.N[q][j]);
                    }
                }
            }
            if (scheme == MassScheme::spectral_uncut) {
                for (std::size_t q = 0; q < nodal.ref_points.size(); ++q) {
                    const Vec2 x = grid.reference_to_physical(e, nodal.ref_points[q]);
                    const Real alpha = evaluate_indicator(indicator, x);
                    const auto gv = detail::gamma_at(material, nodes, nodal.N[q], x);
                    const Coefficients co =
                        effective_coefficients(material, alpha, gv.g1, gv.g2);
                    add_mass(nodes[q], nodes[q], nodal.ref_weights[q] * jac * co.mass);
                }
            }
        } else {
            // Cut element: composed quadrature for both operators,
            // consistent mass blocks regardless of scheme.
            const Vec2 lo = grid.element_origin(e);
            for (const CutPoint& cp : cut->second.points) {
                const Vec2 ref{2.0 * (cp.position.x - lo.x) / grid.hx - 1.0,
                               grid.dimension == 2
                                   ? 2.0 * (cp.position.y - lo.y) / grid.hy - 1.0
                                   : 0.0};
                BasisEval eval = evaluate_basis(grid, e, ref);
                basis_values = std::move(eval.values);
                basis_grads = std::move(eval.gradients);
                const auto gv =
                    detail::gamma_at(material, nodes, basis_values, cp.eval_position);
                const Coefficients co =
                    effective_coefficients(material, cp.alpha, gv.g1, gv.g2);
                for (int i = 0; i < npe; ++i) {
                    const Vec2 gi{basis_grads[i].x * gx, basis_grads[i].y * gy};
                    for (int j = 0; j < npe; ++j) {
                        const Vec2 gj{basis_grads[j].x * gx, basis_grads[j].y * gy};
                        add_stiff(nodes[i], nodes[j],
                                  cp.weight * co.stiffness * (gi.x * gj.x + gi.y * gj.y));
                        add_mass(nodes[i], nodes[j],
                                 cp.weight * co.mass * basis_values[i] * basis_values[j]);
                    }
                }
            }
        }
    }

    // Dirichlet nodes: decoupled rows with unit mass keep the system
    // regular; forcing at those nodes is zeroed by the time integrator.
    for (Index d = 0; d < n; ++d)
        if (dirichlet[d]) m_trips.emplace_back(d, d, 1.0);

    SystemOperators ops;
    ops.n = n;
    ops.M.resize(n, n);
    ops.K.resize(n, n);
    ops.M.setFromTriplets(m_trips.begin(), m_trips.end());
    ops.K.setFromTriplets(k_trips.begin(), k_trips.end());
    ops.dirichlet_nodes = options.dirichlet_nodes;

    ops.mass_solver = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>();
    ops.mass_solver->compute(ops.M);
    if (ops.mass_solver->info() != Eigen::Success)
        throw NumericalError("mass operator is not positive definite; "
                             "check alpha_fict and the gamma floor");
    return ops;
}

SystemOperators assemble(const Grid& grid, const MaterialModel& material,
                         const IndicatorField& indicator, const AssemblyOptions& options) {
    return assemble(grid, material, indicator,
                    compute_cut_quadratures(grid, material, indicator, options.tree_depth),
                    options);
}

Eigen::SparseVector<Real> point_load_vector(const Grid& grid, const Vec2& position) {
    const PointLocation loc = locate_point(grid, position);
    const BasisEval eval = evaluate_basis(grid, loc.element, loc.reference);
    std::vector<Index> nodes;
    grid.element_nodes(loc.element, nodes);
    Eigen::SparseVector<Real> load(grid.node_count());
    load.reserve(static_cast<Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (eval.values[i] != 0.0) load.insert(nodes[i]) = eval.values[i];
    return load;
}

} // namespace voidwave
