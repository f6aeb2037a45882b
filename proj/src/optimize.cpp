#include "voidwave/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace voidwave {

void LbfgsHistory::push(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
    const Real sy = s.dot(y);
    if (sy <= 1e-16 * s.norm() * y.norm()) {
        return; // curvature too weak, keep the older pairs instead
    }
    pairs_.push_back({s, y, 1.0 / sy});
    while (static_cast<int>(pairs_.size()) > memory_) {
        pairs_.pop_front();
    }
}

Eigen::VectorXd LbfgsHistory::direction(const Eigen::VectorXd& gradient) const {
    if (pairs_.empty()) {
        return -gradient;
    }
    Eigen::VectorXd q = gradient;
    std::vector<Real> alpha(pairs_.size());
    for (int i = static_cast<int>(pairs_.size()) - 1; i >= 0; --i) {
        const Pair& p = pairs_[static_cast<std::size_t>(i)];
        alpha[static_cast<std::size_t>(i)] = p.rho * p.s.dot(q);
        q -= alpha[static_cast<std::size_t>(i)] * p.y;
    }
    const Pair& last = pairs_.back();
    q *= last.s.dot(last.y) / last.y.dot(last.y);
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const Pair& p = pairs_[i];
        const Real beta = p.rho * p.y.dot(q);
        q += (alpha[i] - beta) * p.s;
    }
    return -q;
}

Eigen::VectorXd lbfgs_direction(const LbfgsHistory& history,
                                const Eigen::VectorXd& gradient) {
    return history.direction(gradient);
}

namespace {

Eigen::VectorXd clip(const Eigen::VectorXd& x, const BoxBounds& bounds) {
    return x.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

// Gradient components pointing out of the feasible box carry no usable
// descent, so they are dropped before testing convergence.
Real projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                             const BoxBounds& bounds) {
    Real norm = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Real gi = g[i];
        if (x[i] <= bounds.lower && gi > 0.0) gi = 0.0;
        if (x[i] >= bounds.upper && gi < 0.0) gi = 0.0;
        norm = std::max(norm, std::abs(gi));
    }
    return norm;
}

} // namespace

InversionState minimize(const ObjectiveGradient& objective, Eigen::VectorXd start,
                        const BoxBounds& bounds, const OptimizeOptions& options,
                        const std::function<void(const InversionState&)>& on_iteration) {
    if (!(bounds.lower < bounds.upper)) {
        throw ConfigError("minimize: bounds must satisfy lower < upper");
    }

    InversionState state;
    state.model = clip(start, bounds);

    Eigen::VectorXd gradient(state.model.size());
    state.objective = objective(state.model, &gradient);
    state.initial_objective = state.objective;
    if (!std::isfinite(state.objective)) {
        throw NumericalError("minimize: objective is not finite at the start");
    }
    const Real chi0 = std::max(state.initial_objective, 1e-300);

    auto record = [&](Real step) {
        IterationRecord rec;
        rec.iteration = state.iterations;
        rec.objective = state.objective;
        rec.normalized_objective = state.objective / chi0;
        rec.projected_gradient_norm = projected_gradient_norm(state.model, gradient, bounds);
        rec.step_length = step;
        state.trace.push_back(rec);
    };
    record(0.0);

    // The misfit carries physical units (squared displacements can be
    // ~1e-22 in SI), so stationarity is judged relative to the starting
    // gradient rather than against an absolute number.
    const Real gradient_threshold =
        options.gradient_tolerance * state.trace.front().projected_gradient_norm;

    LbfgsHistory history(options.memory);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (state.trace.back().projected_gradient_norm <= gradient_threshold) {
            state.stop_reason = "projected gradient below tolerance";
            return state;
        }

        Eigen::VectorXd direction = history.direction(gradient);
        if (history.empty()) {
            // Steepest descent carries the objective's (physical) scale;
            // normalize so the first trial step moves the largest
            // component by one. Later iterations inherit their scale
            // from the curvature pairs.
            direction /= direction.cwiseAbs().maxCoeff();
        }

        // Backtracking on the projected step: the decrease is measured
        // against g.(x_candidate - x), which stays a descent predictor
        // after clipping.
        Real step = 1.0;
        Eigen::VectorXd candidate;
        Real candidate_objective = state.objective;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h) {
            candidate = clip(state.model + step * direction, bounds);
            const Real predicted = gradient.dot(candidate - state.model);
            if (predicted >= 0.0) {
                step *= 0.5; // clipping removed all descent at this length
                continue;
            }
            candidate_objective = objective(candidate, nullptr);
            if (std::isfinite(candidate_objective) &&
                candidate_objective <= state.objective + options.armijo_c1 * predicted) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            state.stop_reason = "line search exhausted";
            return state;
        }

        Eigen::VectorXd new_gradient(state.model.size());
        candidate_objective = objective(candidate, &new_gradient);

        history.push(candidate - state.model, new_gradient - gradient);
        state.model = candidate;
        state.objective = candidate_objective;
        gradient = new_gradient;
        state.iterations = iter + 1;
        record(step);
        if (on_iteration) {
            on_iteration(state);
        }
    }
    state.stop_reason = "iteration limit reached";
    return state;
}

} // namespace voidwave
