#include "voidwave/adjoint.hpp"

#include "element_tables.hpp"

#include <cmath>

namespace voidwave {

using detail::QuadTable;

namespace {

void check_matching(const WaveRecording& a, const WaveRecording& b) {
    if (a.samples.rows() != b.samples.rows() || a.samples.cols() != b.samples.cols())
        throw ConfigError("recordings have mismatched sample shapes");
    if (std::abs(a.dt - b.dt) > 1e-15 * std::max(a.dt, b.dt))
        throw ConfigError("recordings have mismatched sample intervals");
    if (a.receivers.size() != b.receivers.size())
        throw ConfigError("recordings have mismatched receiver sets");
}

} // namespace

Real misfit(const WaveRecording& simulated, const WaveRecording& observed) {
    check_matching(simulated, observed);
    const Index steps = simulated.samples.rows() - 1;
    Real chi = 0.0;
    for (Index n = 0; n <= steps; ++n) {
        const Real w = (n == 0 || n == steps) ? 0.5 : 1.0;
        chi += w * (simulated.samples.row(n) - observed.samples.row(n)).squaredNorm();
    }
    return 0.5 * simulated.dt * chi;
}

Real misfit(const std::vector<WaveRecording>& simulated,
            const std::vector<WaveRecording>& observed) {
    if (simulated.size() != observed.size())
        throw ConfigError("misfit needs one observation per simulated experiment");
    Real chi = 0.0;
    for (std::size_t s = 0; s < simulated.size(); ++s)
        chi += misfit(simulated[s], observed[s]);
    return chi;
}

AdjointSource make_adjoint_source(const WaveRecording& simulated,
                                  const WaveRecording& observed) {
    check_matching(simulated, observed);
    AdjointSource src;
    src.receivers = simulated.receivers;
    src.residual = simulated.samples - observed.samples;
    src.dt = simulated.dt;
    return src;
}

WavefieldHistory run_adjoint(const SystemOperators& ops, const Grid& grid,
                             const AdjointSource& source, const TimeSettings& time) {
    const Index n = ops.n;
    const Index steps = time.step_count();
    if (source.residual.rows() != steps + 1)
        throw ConfigError("adjoint source does not cover the simulated time span");
    if (steps % time.stride != 0)
        throw ConfigError("step count must be a multiple of the storage stride");

    std::vector<Eigen::SparseVector<Real>> sampling;
    for (const Vec2& r : source.receivers) sampling.push_back(point_load_vector(grid, r));

    // Reversed sweep: index m walks the adjoint forward over the reversed
    // residual, so forward step n pairs with adjoint index N - n.
    auto inject = [&](Index m, Eigen::VectorXd& f) {
        f.setZero();
        const Index fwd = steps - m;
        const Real w = (fwd == 0 || fwd == steps) ? 0.5 : 1.0;
        for (std::size_t r = 0; r < sampling.size(); ++r) {
            const Real amp = -w * source.residual(fwd, static_cast<Index>(r));
            if (amp != 0.0) f += amp * sampling[r];
        }
        for (Index d : ops.dirichlet_nodes) f[d] = 0.0;
    };

    std::vector<Index> stored_steps;
    std::vector<Eigen::VectorXd> stored_states;
    auto store = [&](Index m, const Eigen::VectorXd& lam) {
        if (m % time.stride == 0) {
            stored_steps.push_back(m);
            stored_states.push_back(lam);
        }
    };

    Eigen::VectorXd lam_prev = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd f(n), lam(n);
    store(0, lam_prev);

    // Terminal velocity impulse: the final-time residual enters with the
    // full dt^2 factor (not the half factor of a Taylor start).
    inject(0, f);
    lam = time.dt * time.dt * ops.solve_mass(f);
    store(1, lam);

    for (Index m = 1; m < steps; ++m) {
        inject(m, f);
        Eigen::VectorXd lam_next =
            2.0 * lam - lam_prev + time.dt * time.dt * ops.solve_mass(f - ops.K * lam);
        lam_prev.swap(lam);
        lam.swap(lam_next);
        store(m + 1, lam);
    }

    // Re-reverse so history entry k holds the multiplier at forward step
    // steps[k], matching the forward history layout.
    WavefieldHistory history;
    history.dt = time.dt;
    const std::size_t count = stored_steps.size();
    history.steps.resize(count);
    history.states.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        history.steps[k] = steps - stored_steps[count - 1 - k];
        history.states[k] = std::move(stored_states[count - 1 - k]);
    }
    return history;
}

GradientFields accumulate_gradient(const WavefieldHistory& forward,
                                   const WavefieldHistory& adjoint, const Grid& grid,
                                   const MaterialModel& material,
                                   const IndicatorField& indicator,
                                   const CutQuadratureMap& cuts,
                                   const AssemblyOptions& options,
                                   const std::vector<char>* inversion_mask) {
    if (forward.steps != adjoint.steps || forward.dt != adjoint.dt)
        throw ConfigError("forward and adjoint histories use different storage grids");
    if (forward.states.empty())
        throw ConfigError("cannot accumulate kernels from an empty history");
    if (forward.accelerations.size() != forward.states.size())
        throw ConfigError("forward history does not carry stored accelerations");
    material.validate(grid);

    const bool spectral_mass =
        (options.mass == MassScheme::spectral_uncut) ||
        (options.mass == MassScheme::automatic && !material.nodal_mode());
    const bool separate = material.tag == Scaling::separate;

    const Index n = grid.node_count();
    const int npe = grid.nodes_per_element();
    const Real jac = grid.dimension == 2 ? 0.25 * grid.hx * grid.hy : 0.5 * grid.hx;
    const Real gx = 2.0 / grid.hx;
    const Real gy = grid.dimension == 2 ? 2.0 / grid.hy : 0.0;

    const QuadTable gauss = detail::tensor_table(grid, gauss_legendre(grid.degree + 1));
    const QuadTable nodal = detail::nodal_table(grid);

    // Per-element integration points: uncut elements use the Gauss table
    // for the stiffness kernel and, matching the mass scheme, either the
    // Gauss or the nodal table for the mass kernel; cut elements use their
    // composed points for both.
    struct PointData {
        Index element;
        Vec2 ref;              // reference coordinates
        Real weight;           // physical-measure weight
        Vec2 eval_position;    // for piecewise-constant factors
        Real alpha;
        bool mass_term;
        bool stiffness_term;
        Real time_mass = 0.0;  // accumulated int u_tt l dt
        Real time_stiff = 0.0; // accumulated int grad u . grad l dt
    };
    std::vector<PointData> pts;
    for (Index e = 0; e < grid.element_count(); ++e) {
        const auto cut = cuts.find(e);
        if (cut == cuts.end()) {
            for (std::size_t q = 0; q < gauss.ref_points.size(); ++q) {
                const Vec2 x = grid.reference_to_physical(e, gauss.ref_points[q]);
                pts.push_back({e, gauss.ref_points[q], gauss.ref_weights[q] * jac, x,
                               evaluate_indicator(indicator, x), !spectral_mass, true});
            }
            if (spectral_mass) {
                for (std::size_t q = 0; q < nodal.ref_points.size(); ++q) {
                    const Vec2 x = grid.reference_to_physical(e, nodal.ref_points[q]);
                    pts.push_back({e, nodal.ref_points[q], nodal.ref_weights[q] * jac, x,
                                   evaluate_indicator(indicator, x), true, false});
                }
            }
        } else {
            const Vec2 lo = grid.element_origin(e);
            for (const CutPoint& cp : cut->second.points) {
                const Vec2 ref{2.0 * (cp.position.x - lo.x) / grid.hx - 1.0,
                               grid.dimension == 2
                                   ? 2.0 * (cp.position.y - lo.y) / grid.hy - 1.0
                                   : 0.0};
                pts.push_back({e, ref, cp.weight, cp.eval_position, cp.alpha, true, true});
            }
        }
    }

    // Tabulate basis data and connectivity per point once.
    std::vector<std::vector<Real>> Np(pts.size());
    std::vector<std::vector<Vec2>> dNp(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
        BasisEval eval = evaluate_basis(grid, pts[p].element, pts[p].ref);
        Np[p] = std::move(eval.values);
        dNp[p] = std::move(eval.gradients);
    }
    std::vector<std::vector<Index>> connectivity(grid.element_count());
    for (Index e = 0; e < grid.element_count(); ++e)
        grid.element_nodes(e, connectivity[e]);

    // Time integration over stored snapshots (trapezoid on the stored grid).
    // Pairing the multiplier with the integrator's own accelerations makes
    // the mass kernel the exact derivative of the discrete misfit when every
    // step is stored; the stiffness pairing is exact the same way because
    // the terminal multiplier vanishes.
    const std::size_t stored = forward.states.size();
    for (std::size_t k = 0; k < stored; ++k) {
        const std::size_t lo_k = k == 0 ? 0 : k - 1;
        const std::size_t hi_k = k == stored - 1 ? stored - 1 : k + 1;
        const Real w_time =
            0.5 * static_cast<Real>(forward.steps[hi_k] - forward.steps[lo_k]) * forward.dt;
        const Eigen::VectorXd& u = forward.states[k];
        const Eigen::VectorXd& l = adjoint.states[k];
        const Eigen::VectorXd& acc = forward.accelerations[k];

        for (std::size_t p = 0; p < pts.size(); ++p) {
            PointData& pd = pts[p];
            const std::vector<Index>& nodes = connectivity[pd.element];
            if (pd.mass_term) {
                Real a_q = 0.0, l_q = 0.0;
                for (int i = 0; i < npe; ++i) {
                    a_q += Np[p][i] * acc[nodes[i]];
                    l_q += Np[p][i] * l[nodes[i]];
                }
                pd.time_mass += w_time * a_q * l_q;
            }
            if (pd.stiffness_term) {
                Vec2 gu{0.0, 0.0}, gl{0.0, 0.0};
                for (int i = 0; i < npe; ++i) {
                    gu.x += dNp[p][i].x * u[nodes[i]];
                    gu.y += dNp[p][i].y * u[nodes[i]];
                    gl.x += dNp[p][i].x * l[nodes[i]];
                    gl.y += dNp[p][i].y * l[nodes[i]];
                }
                pd.time_stiff += w_time * (gu.x * gl.x * gx * gx + gu.y * gl.y * gy * gy);
            }
        }
    }

    // Scatter: d a / d gamma_hat_i carries a basis factor N_i at the point.
    GradientFields grad;
    grad.primary.assign(static_cast<std::size_t>(n), 0.0);
    if (separate) grad.secondary.assign(static_cast<std::size_t>(n), 0.0);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const PointData& pd = pts[p];
        const std::vector<Index>& nodes = connectivity[pd.element];
        const auto gv = detail::gamma_at(material, nodes, Np[p], pd.eval_position);
        const CoefficientDerivatives dc =
            coefficient_derivatives(material, pd.alpha, gv.g1, gv.g2);
        for (int i = 0; i < npe; ++i) {
            const Real scatter = pd.weight * Np[p][i];
            Real g1 = 0.0, g2 = 0.0;
            if (pd.mass_term) {
                g1 += dc.mass_g1 * pd.time_mass;
                g2 += dc.mass_g2 * pd.time_mass;
            }
            if (pd.stiffness_term) {
                g1 += dc.stiffness_g1 * pd.time_stiff;
                g2 += dc.stiffness_g2 * pd.time_stiff;
            }
            grad.primary[nodes[i]] += scatter * g1;
            if (separate) grad.secondary[nodes[i]] += scatter * g2;
        }
    }

    if (inversion_mask) {
        if (inversion_mask->size() != grad.primary.size())
            throw ConfigError("inversion mask size does not match the grid");
        for (std::size_t i = 0; i < grad.primary.size(); ++i) {
            if ((*inversion_mask)[i]) continue;
            grad.primary[i] = 0.0;
            if (separate) grad.secondary[i] = 0.0;
        }
    }
    return grad;
}

} // namespace voidwave
