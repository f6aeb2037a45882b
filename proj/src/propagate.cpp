#include "voidwave/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace voidwave {

Real sine_burst(Real t, Real f_c, Real cycles) {
    const Real support = cycles / f_c;
    if (t <= 0.0 || t >= support) return 0.0;
    return std::sin(2.0 * M_PI * f_c * t) *
           0.5 * (1.0 - std::cos(2.0 * M_PI * f_c * t / cycles));
}

Real gaussian_bell(Real x, Real center, Real width, Real amplitude) {
    const Real s = (x - center) / width;
    return amplitude * std::exp(-0.5 * s * s);
}

Real analytic_free_reflection(Real x, Real t, const std::function<Real(Real)>& pulse,
                              Real x_f, Real c0) {
    if (x > x_f + 1e-12)
        throw ConfigError("analytic free-boundary solution is defined for x <= x_f");
    return pulse(x - c0 * t) + pulse(2.0 * x_f - x - c0 * t);
}

SourceSpec SourceSpec::point_burst(Vec2 position, BurstSpec burst) {
    SourceSpec s;
    s.kind = Kind::point_force;
    s.position = position;
    s.burst = burst;
    return s;
}

SourceSpec SourceSpec::travelling_bell(Real center, Real width, Real amplitude) {
    SourceSpec s;
    s.kind = Kind::initial_displacement;
    s.bell_center = center;
    s.bell_width = width;
    s.bell_amplitude = amplitude;
    return s;
}

Index TimeSettings::step_count() const {
    if (dt <= 0.0 || duration <= 0.0)
        throw ConfigError("time step and duration must be positive");
    const auto n = static_cast<Index>(std::llround(duration / dt));
    if (n < 1 || std::abs(n * dt - duration) > 1e-9 * duration)
        throw ConfigError("duration must be an integer multiple of the time step");
    return n;
}

InitialState gaussian_initial_state(const Grid& grid, Real center, Real width,
                                    Real amplitude, Real c0,
                                    const std::function<bool(const Vec2&)>& support) {
    InitialState init;
    const Index n = grid.node_count();
    init.u0 = Eigen::VectorXd::Zero(n);
    init.v0 = Eigen::VectorXd::Zero(n);
    for (Index i = 0; i < n; ++i) {
        const Vec2 x = grid.node_position(i);
        if (support && !support(x)) continue;
        const Real g = gaussian_bell(x.x, center, width, amplitude);
        init.u0[i] = g;
        init.v0[i] = -c0 * g * (-(x.x - center) / (width * width));
    }
    return init;
}

namespace {

// Exponential blow-up detector: a growth factor of 1e6 within 50 steps is
// far beyond any physical transient but is reached within a few dozen
// steps once the stability limit is crossed. The first few windows are
// exempt: a burst ramping up from rest grows polynomially from ~0 and
// produces huge ratios there (non-finite values are still caught).
class BlowupDetector {
public:
    explicit BlowupDetector(Real dt, Real h) : dt_(dt), h_(h) {}

    void check(const Eigen::VectorXd& u, Index step) {
        const Real peak = u.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(peak)) fail(step, peak);
        history_[static_cast<std::size_t>(step % window)] = peak;
        if (step >= 3 * window) {
            const Real old = history_[static_cast<std::size_t>((step + 1) % window)];
            if (old > 0.0 && peak > 1e6 * old) fail(step, peak);
        }
    }

private:
    [[noreturn]] void fail(Index step, Real peak) const {
        std::ostringstream msg;
        msg << "time integration unstable at step " << step << " (|u|_inf = " << peak
            << "); the time step " << dt_ << " s exceeds the stability limit for "
            << "element size " << h_ << " m - reduce delta_t_s or check cut-cell "
            << "slivers";
        throw NumericalError(msg.str());
    }

    static constexpr Index window = 50;
    Real history_[50] = {0.0};
    Real dt_;
    Real h_;
};

} // namespace

ForwardResult run_forward(const SystemOperators& ops, const Grid& grid,
                          const std::vector<SourceSpec>& sources,
                          const std::vector<Vec2>& receivers, const TimeSettings& time,
                          const ForwardOptions& options) {
    const Index n = ops.n;
    const Index steps = time.step_count();
    if (time.stride < 1) throw ConfigError("storage stride must be >= 1");
    if (options.store_history && steps % time.stride != 0)
        throw ConfigError("step count must be a multiple of the storage stride");

    // Consistent point loads and the receiver sampling operator share the
    // same basis evaluation, which makes source/receiver swaps exact.
    std::vector<Eigen::SparseVector<Real>> loads;
    for (const SourceSpec& s : sources) {
        if (s.kind != SourceSpec::Kind::point_force)
            throw ConfigError("run_forward takes point forces; initial states are "
                              "passed through ForwardOptions");
        loads.push_back(point_load_vector(grid, s.position));
    }
    std::vector<Eigen::SparseVector<Real>> sampling;
    sampling.reserve(receivers.size());
    for (const Vec2& r : receivers) sampling.push_back(point_load_vector(grid, r));

    ForwardResult result;
    result.recording.receivers = receivers;
    result.recording.dt = time.dt;
    result.recording.samples.resize(steps + 1, static_cast<Index>(receivers.size()));
    result.history.dt = time.dt;

    Eigen::VectorXd u_prev = options.initial ? options.initial->u0
                                             : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v0 = options.initial ? options.initial->v0
                                         : Eigen::VectorXd::Zero(n);
    if (u_prev.size() != n || v0.size() != n)
        throw ConfigError("initial state size does not match the operator size");

    auto force_at = [&](Real t, Eigen::VectorXd& f) {
        f.setZero();
        for (std::size_t s = 0; s < sources.size(); ++s) {
            const BurstSpec& b = sources[s].burst;
            const Real amp = b.amplitude * sine_burst(t, b.f_c, b.cycles);
            if (amp != 0.0) f += amp * loads[s];
        }
        for (Index d : ops.dirichlet_nodes) f[d] = 0.0;
    };
    auto record = [&](Index step, const Eigen::VectorXd& u) {
        for (std::size_t r = 0; r < sampling.size(); ++r)
            result.recording.samples(step, static_cast<Index>(r)) = sampling[r].dot(u);
    };
    auto store = [&](Index step, const Eigen::VectorXd& u, const Eigen::VectorXd& a) {
        if (!options.store_history || step % time.stride != 0) return;
        result.history.steps.push_back(step);
        result.history.states.push_back(u);
        result.history.accelerations.push_back(a);
    };

    BlowupDetector detector(time.dt, grid.hx);
    Eigen::VectorXd f(n), u(n), a(n);

    record(0, u_prev);

    // Second-order Taylor start: u^1 = u^0 + dt v^0 + dt^2/2 M^{-1}(f^0 - K u^0).
    force_at(0.0, f);
    a = ops.solve_mass(f - ops.K * u_prev);
    store(0, u_prev, a);
    u = u_prev + time.dt * v0 + 0.5 * time.dt * time.dt * a;
    record(1, u);
    detector.check(u, 1);

    for (Index step = 1; step < steps; ++step) {
        force_at(step * time.dt, f);
        a = ops.solve_mass(f - ops.K * u);
        store(step, u, a);
        Eigen::VectorXd u_next = 2.0 * u - u_prev + time.dt * time.dt * a;
        u_prev.swap(u);
        u.swap(u_next);
        record(step + 1, u);
        detector.check(u, step + 1);
    }

    if (options.store_history) {
        force_at(steps * time.dt, f);
        a = ops.solve_mass(f - ops.K * u);
        store(steps, u, a);
    }
    return result;
}

WaveRecording resample_recording(const WaveRecording& rec, Real dt, Index steps) {
    const Index old_steps = rec.samples.rows() - 1;
    const Real span_old = old_steps * rec.dt;
    const Real span_new = steps * dt;
    if (std::abs(span_old - span_new) > 1e-9 * std::max(span_old, span_new))
        throw ConfigError("cannot resample a recording onto a different time span");

    WaveRecording out;
    out.receivers = rec.receivers;
    out.dt = dt;
    out.source_index = rec.source_index;
    out.samples.resize(steps + 1, rec.samples.cols());
    for (Index k = 0; k <= steps; ++k) {
        const Real t = k * dt;
        const Real s = t / rec.dt;
        const Index i0 = std::clamp<Index>(static_cast<Index>(std::floor(s)), 0, old_steps);
        const Index i1 = std::min<Index>(i0 + 1, old_steps);
        const Real frac = std::clamp<Real>(s - static_cast<Real>(i0), 0.0, 1.0);
        out.samples.row(k) =
            (1.0 - frac) * rec.samples.row(i0) + frac * rec.samples.row(i1);
    }
    return out;
}

} // namespace voidwave
