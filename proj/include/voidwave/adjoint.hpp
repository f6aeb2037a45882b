#pragma once

#include "voidwave/assembly.hpp"
#include "voidwave/propagate.hpp"

namespace voidwave {

// Sum of squared receiver residuals over sources, integrated in time with
// the trapezoidal rule: chi = 1/2 sum_s sum_r int (u - u0)^2 dt.
// Simulated and observed recordings must share receiver layout and
// sampling.
Real misfit(const WaveRecording& simulated, const WaveRecording& observed);
Real misfit(const std::vector<WaveRecording>& simulated,
            const std::vector<WaveRecording>& observed);

// Receiver-side data misfit injected backward in time.
struct AdjointSource {
    std::vector<Vec2> receivers;
    Eigen::MatrixXd residual; // (steps+1) x receivers, simulated - observed
    Real dt = 0.0;
};

AdjointSource make_adjoint_source(const WaveRecording& simulated,
                                  const WaveRecording& observed);

// Solves the adjoint system: the same operators swept backward in time
// with the negated, trapezoid-weighted residual injected at the
// receivers. The terminal conditions are homogeneous; the final-time
// residual enters as a velocity impulse, which keeps the discrete
// directional derivatives second-order consistent with the forward
// scheme. The returned history is re-reversed so entry k pairs with
// forward step history.steps[k].
WavefieldHistory run_adjoint(const SystemOperators& ops, const Grid& grid,
                             const AdjointSource& source, const TimeSettings& time);

// Nodal gradient of the misfit w.r.t. the scaling coefficients.
struct GradientFields {
    std::vector<Real> primary;   // d chi / d gamma (gamma_rho for separate)
    std::vector<Real> secondary; // d chi / d gamma_c (separate only)
};

// Accumulates the sensitivity kernels over matched forward/adjoint
// snapshots: at every quadrature point the mass kernel integrates
// -du/dt * dl/dt and the stiffness kernel grad u . grad l in time
// (trapezoid over stored steps, velocities by central differences), each
// multiplied by the coefficient derivative of the active parametrization
// and scattered with the basis. Quadrature layout mirrors assemble() so
// the derivative matches the discrete objective. Entries outside the
// inversion mask (mask[i] == 0) are zeroed.
GradientFields accumulate_gradient(const WavefieldHistory& forward,
                                   const WavefieldHistory& adjoint, const Grid& grid,
                                   const MaterialModel& material,
                                   const IndicatorField& indicator,
                                   const CutQuadratureMap& cuts,
                                   const AssemblyOptions& options = {},
                                   const std::vector<char>* inversion_mask = nullptr);

} // namespace voidwave
