#pragma once

#include "voidwave/core.hpp"

#include <Eigen/Dense>

#include <deque>
#include <functional>
#include <string>

namespace voidwave {

struct BoxBounds {
    Real lower = 0.0;
    Real upper = 1.2;
};

// Limited-memory quasi-Newton history: (step, gradient difference) pairs.
class LbfgsHistory {
public:
    explicit LbfgsHistory(int memory = 10) : memory_(memory) {}

    // Stores a pair unless the curvature s.y is too small to be trusted.
    void push(const Eigen::VectorXd& s, const Eigen::VectorXd& y);
    void clear() { pairs_.clear(); }
    bool empty() const { return pairs_.empty(); }

    // Two-loop recursion: -H g with the usual y.s/y.y initial scaling;
    // steepest descent while the history is empty.
    Eigen::VectorXd direction(const Eigen::VectorXd& gradient) const;

private:
    struct Pair {
        Eigen::VectorXd s, y;
        Real rho;
    };
    int memory_;
    std::deque<Pair> pairs_;
};

Eigen::VectorXd lbfgs_direction(const LbfgsHistory& history,
                                const Eigen::VectorXd& gradient);

struct OptimizeOptions {
    int max_iterations = 25;
    int memory = 10;
    Real armijo_c1 = 1e-4;
    int max_halvings = 30;
    // Inf-norm stationarity threshold on the projected gradient, relative
    // to its starting value (the misfit carries physical units).
    Real gradient_tolerance = 1e-12;
};

struct IterationRecord {
    int iteration = 0;
    Real objective = 0.0;
    Real normalized_objective = 1.0;
    Real projected_gradient_norm = 0.0;
    Real step_length = 0.0;
};

struct InversionState {
    Eigen::VectorXd model;
    Real objective = 0.0;
    Real initial_objective = 0.0;
    int iterations = 0;
    std::string stop_reason;
    std::vector<IterationRecord> trace; // entry 0 is the initial point
};

// Evaluates the objective and, when `gradient` is non-null, its gradient.
using ObjectiveGradient =
    std::function<Real(const Eigen::VectorXd& model, Eigen::VectorXd* gradient)>;

// Box-constrained L-BFGS with Armijo backtracking: candidates are clipped
// onto the bounds componentwise and the Armijo test uses the resulting
// projected step, so every visited model satisfies the bounds exactly and
// the objective trace never increases. The callback (if given) runs after
// every accepted iteration.
InversionState minimize(const ObjectiveGradient& objective, Eigen::VectorXd start,
                        const BoxBounds& bounds, const OptimizeOptions& options = {},
                        const std::function<void(const InversionState&)>& on_iteration = {});

} // namespace voidwave
