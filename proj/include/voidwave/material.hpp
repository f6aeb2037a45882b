#pragma once

#include "voidwave/geometry.hpp"
#include "voidwave/grid.hpp"

#include <functional>
#include <optional>
#include <string>

namespace voidwave {

// The four ways of scaling density and wave speed by the dimensionless
// field gamma (1 in intact material, near 0 inside voids):
//   rho:      rho = gamma rho0,      c unchanged
//   c:        rho unchanged,         c = gamma c0
//   rhoc:     rho = gamma rho0,      c = gamma c0
//   separate: rho = gamma_rho rho0,  c = gamma_c c0 (two independent fields)
enum class Scaling { rho, c, rhoc, separate };

Scaling parse_scaling(const std::string& name);
std::string scaling_name(Scaling tag);

// Nodal coefficients of a scaling field on the same basis as the solution.
struct ScalingField {
    std::vector<Real> coeffs;
    Real lower = 0.0;
    Real upper = 1.2;
};

ScalingField uniform_field(const Grid& grid, Real value, Real lower = 0.0,
                           Real upper = 1.2);

// Clamps every coefficient into [lower, upper]; idempotent.
ScalingField clip_field(ScalingField field);

struct MaterialModel {
    Real rho0 = 2700.0; // kg/m^3
    Real c0 = 6000.0;   // m/s
    Scaling tag = Scaling::rho;

    // Exactly one gamma source is active:
    //  - nodal fields (inversion mode): `gamma`, or `gamma_rho` + `gamma_c`
    //    for the separate tag;
    //  - geometry mode (forward studies, synthetic references): gamma is
    //    piecewise constant, gamma_void inside `gamma_geometry`, 1 outside.
    std::optional<ScalingField> gamma;
    std::optional<ScalingField> gamma_rho;
    std::optional<ScalingField> gamma_c;
    ImplicitGeometry gamma_geometry;
    Real gamma_void = 1e-5;

    bool nodal_mode() const { return gamma.has_value() || gamma_rho.has_value(); }
    // Throws unless the field layout matches the tag and the grid.
    void validate(const Grid& grid) const;
};

// Effective PDE coefficients: the scaled wave equation reads
//   a_m(x) u_tt = div(a_k(x) grad u) + f.
// Both include the FCM indicator alpha. gamma enters floored at
// `gamma_floor` so the mass operator stays invertible when the optimizer
// drives nodal values to the 0.0 bound.
struct Coefficients {
    Real mass = 0.0;      // a_m
    Real stiffness = 0.0; // a_k
};

// Partial derivatives of (a_m, a_k) w.r.t. the gamma arguments; for
// mono-parameter tags only the first pair is nonzero. Below the floor the
// coefficients are constant, so the derivatives vanish there.
struct CoefficientDerivatives {
    Real mass_g1 = 0.0;
    Real stiffness_g1 = 0.0;
    Real mass_g2 = 0.0;
    Real stiffness_g2 = 0.0;
};

constexpr Real gamma_floor = 1e-8;

// gamma2 is read only by the separate tag (as gamma_c).
Coefficients effective_coefficients(const MaterialModel& model, Real alpha,
                                    Real gamma1, Real gamma2 = 1.0);
CoefficientDerivatives coefficient_derivatives(const MaterialModel& model, Real alpha,
                                               Real gamma1, Real gamma2 = 1.0);

// L2 projection of a pointwise function onto the nodal basis: solves
// (consistent basis mass) gamma_hat = rhs with rhs_i = integral of g N_i.
// Elements cut by `interfaces` are integrated with composed quadrature so
// discontinuous g is resolved; pass the default for smooth g.
ScalingField l2_project(const Grid& grid, const std::function<Real(const Vec2&)>& g,
                        const ImplicitGeometry& interfaces = {}, int tree_depth = 5,
                        Real lower = 0.0, Real upper = 1.2);

} // namespace voidwave
