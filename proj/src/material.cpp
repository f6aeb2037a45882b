#include "voidwave/material.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace voidwave {

Scaling parse_scaling(const std::string& name) {
    if (name == "rho") return Scaling::rho;
    if (name == "c") return Scaling::c;
    if (name == "rhoc") return Scaling::rhoc;
    if (name == "separate") return Scaling::separate;
    throw ConfigError("unknown scaling parametrization '" + name +
                      "' (expected rho, c, rhoc or separate)");
}

std::string scaling_name(Scaling tag) {
    switch (tag) {
    case Scaling::rho: return "rho";
    case Scaling::c: return "c";
    case Scaling::rhoc: return "rhoc";
    case Scaling::separate: return "separate";
    }
    return "?";
}

ScalingField uniform_field(const Grid& grid, Real value, Real lower, Real upper) {
    ScalingField f;
    f.coeffs.assign(static_cast<std::size_t>(grid.node_count()), value);
    f.lower = lower;
    f.upper = upper;
    return f;
}

ScalingField clip_field(ScalingField field) {
    for (Real& v : field.coeffs) v = std::clamp(v, field.lower, field.upper);
    return field;
}

void MaterialModel::validate(const Grid& grid) const {
    if (rho0 <= 0.0 || c0 <= 0.0)
        throw ConfigError("material rho0 and c0 must be positive");
    const auto nodes = static_cast<std::size_t>(grid.node_count());
    if (tag == Scaling::separate) {
        if (gamma.has_value() || gamma_rho.has_value() != gamma_c.has_value())
            throw ConfigError("separate scaling uses the gamma_rho/gamma_c field pair");
        if (gamma_rho && (gamma_rho->coeffs.size() != nodes || gamma_c->coeffs.size() != nodes))
            throw ConfigError("scaling field size does not match the grid");
    } else {
        if (gamma_rho.has_value() || gamma_c.has_value())
            throw ConfigError(scaling_name(tag) + std::string(" scaling uses a single gamma field"));
        if (gamma && gamma->coeffs.size() != nodes)
            throw ConfigError("scaling field size does not match the grid");
    }
    if (!nodal_mode() && gamma_void <= 0.0)
        throw ConfigError("geometry-mode gamma_void must be positive");
}

Coefficients effective_coefficients(const MaterialModel& model, Real alpha,
                                    Real gamma1, Real gamma2) {
    const Real c2 = model.c0 * model.c0;
    const Real g1 = std::max(gamma1, gamma_floor);
    Coefficients k;
    switch (model.tag) {
    case Scaling::rho:
        k.mass = alpha * g1 * model.rho0;
        k.stiffness = alpha * g1 * model.rho0 * c2;
        break;
    case Scaling::c:
        k.mass = alpha * model.rho0;
        k.stiffness = alpha * g1 * g1 * model.rho0 * c2;
        break;
    case Scaling::rhoc:
        k.mass = alpha * g1 * model.rho0;
        k.stiffness = alpha * g1 * g1 * g1 * model.rho0 * c2;
        break;
    case Scaling::separate: {
        const Real g2 = std::max(gamma2, gamma_floor);
        k.mass = alpha * g1 * model.rho0;
        k.stiffness = alpha * g1 * g2 * g2 * model.rho0 * c2;
        break;
    }
    }
    return k;
}

CoefficientDerivatives coefficient_derivatives(const MaterialModel& model, Real alpha,
                                               Real gamma1, Real gamma2) {
    const Real c2 = model.c0 * model.c0;
    CoefficientDerivatives d;
    const bool floored1 = gamma1 <= gamma_floor;
    const Real g1 = std::max(gamma1, gamma_floor);
    switch (model.tag) {
    case Scaling::rho:
        if (!floored1) {
            d.mass_g1 = alpha * model.rho0;
            d.stiffness_g1 = alpha * model.rho0 * c2;
        }
        break;
    case Scaling::c:
        if (!floored1) d.stiffness_g1 = 2.0 * alpha * g1 * model.rho0 * c2;
        break;
    case Scaling::rhoc:
        if (!floored1) {
            d.mass_g1 = alpha * model.rho0;
            d.stiffness_g1 = 3.0 * alpha * g1 * g1 * model.rho0 * c2;
        }
        break;
    case Scaling::separate: {
        const bool floored2 = gamma2 <= gamma_floor;
        const Real g2 = std::max(gamma2, gamma_floor);
        if (!floored1) {
            d.mass_g1 = alpha * model.rho0;
            d.stiffness_g1 = alpha * g2 * g2 * model.rho0 * c2;
        }
        if (!floored2) d.stiffness_g2 = 2.0 * alpha * g1 * g2 * model.rho0 * c2;
        break;
    }
    }
    return d;
}

ScalingField l2_project(const Grid& grid, const std::function<Real(const Vec2&)>& g,
                        const ImplicitGeometry& interfaces, int tree_depth,
                        Real lower, Real upper) {
    const Index n = grid.node_count();
    const int npe = grid.nodes_per_element();
    const QuadratureRule rule = gauss_legendre(grid.degree + 1);

    // Tabulate the tensor-product basis at the reference quadrature points.
    std::vector<Vec2> ref_pts;
    std::vector<Real> ref_w;
    if (grid.dimension == 1) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            ref_pts.push_back({rule.points[q], 0.0});
            ref_w.push_back(rule.weights[q]);
        }
    } else {
        for (std::size_t qy = 0; qy < rule.size(); ++qy)
            for (std::size_t qx = 0; qx < rule.size(); ++qx) {
                ref_pts.push_back({rule.points[qx], rule.points[qy]});
                ref_w.push_back(rule.weights[qx] * rule.weights[qy]);
            }
    }
    std::vector<std::vector<Real>> N(ref_pts.size());
    for (std::size_t q = 0; q < ref_pts.size(); ++q)
        N[q] = evaluate_basis(grid, 0, ref_pts[q]).values;

    const Real jac = grid.dimension == 2 ? 0.25 * grid.hx * grid.hy : 0.5 * grid.hx;
    const IndicatorField unit_indicator{ImplicitGeometry{}, 1.0, 1.0};

    std::vector<Eigen::Triplet<Real>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    std::vector<Index> nodes;
    std::vector<Real> values;
    for (Index e = 0; e < grid.element_count(); ++e) {
        grid.element_nodes(e, nodes);
        const bool is_cut = !interfaces.empty() &&
                            classify_element(interfaces, grid, e) == CellClass::cut;
        if (!is_cut) {
            const Vec2 lo = grid.element_origin(e);
            for (std::size_t q = 0; q < ref_pts.size(); ++q) {
                const Vec2 x = grid.reference_to_physical(e, ref_pts[q]);
                const Real w = ref_w[q] * jac;
                const Real gv = g(x);
                (void)lo;
                for (int i = 0; i < npe; ++i) {
                    rhs[nodes[i]] += w * gv * N[q][i];
                    for (int j = 0; j < npe; ++j)
                        trips.emplace_back(nodes[i], nodes[j], w * N[q][i] * N[q][j]);
                }
            }
        } else {
            const ComposedQuadrature cq = build_composed_quadrature(
                interfaces, unit_indicator, grid, e, tree_depth, rule);
            const Vec2 lo = grid.element_origin(e);
            for (const CutPoint& cp : cq.points) {
                const Vec2 ref{2.0 * (cp.position.x - lo.x) / grid.hx - 1.0,
                               grid.dimension == 2
                                   ? 2.0 * (cp.position.y - lo.y) / grid.hy - 1.0
                                   : 0.0};
                values = evaluate_basis(grid, e, ref).values;
                // Discontinuous integrands take their leaf-representative value.
                const Real gv = g(cp.eval_position);
                for (int i = 0; i < npe; ++i) {
                    rhs[nodes[i]] += cp.weight * gv * values[i];
                    for (int j = 0; j < npe; ++j)
                        trips.emplace_back(nodes[i], nodes[j],
                                           cp.weight * values[i] * values[j]);
                }
            }
        }
    }

    Eigen::SparseMatrix<Real> mass(n, n);
    mass.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<Real>> solver(mass);
    if (solver.info() != Eigen::Success)
        throw NumericalError("projection mass matrix is not positive definite");
    const Eigen::VectorXd sol = solver.solve(rhs);

    ScalingField f;
    f.lower = lower;
    f.upper = upper;
    f.coeffs.assign(sol.data(), sol.data() + sol.size());
    return f;
}

} // namespace voidwave
