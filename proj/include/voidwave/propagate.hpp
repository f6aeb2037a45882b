#pragma once

#include "voidwave/assembly.hpp"
#include "voidwave/grid.hpp"

#include <Eigen/Dense>

#include <functional>

namespace voidwave {

// Hann-windowed sine burst: sin(2 pi f_c t) * 0.5 (1 - cos(2 pi f_c t / cycles))
// on [0, cycles/f_c], zero outside.
Real sine_burst(Real t, Real f_c, Real cycles);

// exp(-(x - center)^2 / (2 width^2)) * amplitude
Real gaussian_bell(Real x, Real center, Real width, Real amplitude = 1.0);

// d'Alembert superposition of an incident right-travelling pulse g and its
// sign-preserving reflection from a free boundary at x_f:
// g(x - c0 t) + g(2 x_f - x - c0 t), valid for x <= x_f.
Real analytic_free_reflection(Real x, Real t, const std::function<Real(Real)>& pulse,
                              Real x_f, Real c0);

struct BurstSpec {
    Real f_c = 500e3;
    Real cycles = 2.0;
    Real amplitude = 1.0;
};

struct SourceSpec {
    enum class Kind { point_force, initial_displacement };
    Kind kind = Kind::point_force;

    Vec2 position{};  // point_force location
    BurstSpec burst{}; // point_force time function

    // initial_displacement: right-travelling Gaussian profile along x
    Real bell_center = 0.0;
    Real bell_width = 0.0;
    Real bell_amplitude = 1.0;

    static SourceSpec point_burst(Vec2 position, BurstSpec burst);
    static SourceSpec travelling_bell(Real center, Real width, Real amplitude = 1.0);
};

struct TimeSettings {
    Real dt = 0.0;
    Real duration = 0.0;
    int stride = 10; // wavefield storage stride

    // Number of time steps; duration must be an integer multiple of dt.
    Index step_count() const;
};

// Receiver samples of one source experiment, recorded every time step.
struct WaveRecording {
    std::vector<Vec2> receivers;
    Real dt = 0.0;
    int source_index = 0;
    Eigen::MatrixXd samples; // (steps+1) x receivers
};

// Nodal solution vectors stored every `stride` steps. Forward runs also
// keep the acceleration M^{-1}(f - K u) at each stored step: sensitivity
// kernels pair it with the adjoint state, and reusing the integrator's own
// accelerations keeps those kernels exact derivatives of the discrete
// misfit. Adjoint histories leave `accelerations` empty.
struct WavefieldHistory {
    Real dt = 0.0;
    std::vector<Index> steps;
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> accelerations;
};

// Nodal initial state (u, u_t) at t = 0; zero by default.
struct InitialState {
    Eigen::VectorXd u0;
    Eigen::VectorXd v0;
};

// Right-travelling Gaussian pulse as an initial state, restricted to nodes
// where `support` holds (so void regions start exactly at rest):
// u(x,0) = A g(x), u_t(x,0) = -c0 A g'(x).
InitialState gaussian_initial_state(const Grid& grid, Real center, Real width,
                                    Real amplitude, Real c0,
                                    const std::function<bool(const Vec2&)>& support = {});

struct ForwardOptions {
    const InitialState* initial = nullptr;
    bool store_history = true;
};

struct ForwardResult {
    WaveRecording recording;
    WavefieldHistory history;
};

// Central-difference time integration of M u_tt + K u = f:
//   u^{n+1} = 2 u^n - u^{n-1} + dt^2 M^{-1} (f^n - K u^n),
// started with a second-order Taylor step from the initial state. Aborts
// with a diagnostic when the solution blows up (unstable dt).
ForwardResult run_forward(const SystemOperators& ops, const Grid& grid,
                          const std::vector<SourceSpec>& sources,
                          const std::vector<Vec2>& receivers, const TimeSettings& time,
                          const ForwardOptions& options = {});

// Linear resampling of a recording onto a new time grid with the same span.
WaveRecording resample_recording(const WaveRecording& rec, Real dt, Index steps);

} // namespace voidwave
