#include "voidwave/optimize.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace voidwave;

namespace {

// Dense reference for the two-loop recursion: apply the inverse-Hessian
// update pair by pair, starting from the scaled identity of the newest
// pair. Same object, different algorithm.
Eigen::VectorXd dense_bfgs_direction(const std::vector<Eigen::VectorXd>& s,
                                     const std::vector<Eigen::VectorXd>& y,
                                     const Eigen::VectorXd& gradient) {
    const Eigen::Index n = gradient.size();
    const Real gamma = s.back().dot(y.back()) / y.back().dot(y.back());
    Eigen::MatrixXd H = gamma * Eigen::MatrixXd::Identity(n, n);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const Real rho = 1.0 / s[k].dot(y[k]);
        const Eigen::MatrixXd V =
            Eigen::MatrixXd::Identity(n, n) - rho * y[k] * s[k].transpose();
        H = V.transpose() * H * V + rho * s[k] * s[k].transpose();
    }
    return -H * gradient;
}

Real rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) {
    const Real a = x[1] - x[0] * x[0];
    const Real b = 1.0 - x[0];
    if (gradient) {
        (*gradient)[0] = -400.0 * a * x[0] - 2.0 * b;
        (*gradient)[1] = 200.0 * a;
    }
    return 100.0 * a * a + b * b;
}

} // namespace

TEST_CASE("an empty history falls back to steepest descent") {
    const LbfgsHistory history(5);
    Eigen::VectorXd g(3);
    g << 1.0, -2.0, 0.5;
    CHECK((history.direction(g) + g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairs without trustworthy curvature are rejected") {
    LbfgsHistory history(5);
    Eigen::VectorXd s(2), y(2);
    s << 1.0, 0.0;
    y << 0.0, 1.0; // s.y = 0
    history.push(s, y);
    CHECK(history.empty());
    y << -1.0, 0.0; // s.y < 0
    history.push(s, y);
    CHECK(history.empty());
}

TEST_CASE("the two-loop recursion matches a dense inverse-Hessian update") {
    std::mt19937 rng(42);
    std::normal_distribution<Real> gauss(0.0, 1.0);
    const Eigen::Index n = 6;
    const int memory = 4;

    LbfgsHistory history(memory);
    std::vector<Eigen::VectorXd> s_all, y_all;
    for (int k = 0; k < 7; ++k) {
        Eigen::VectorXd s(n), y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            s[i] = gauss(rng);
            y[i] = gauss(rng);
        }
        if (s.dot(y) < 0.0) y = -y; // ensure positive curvature
        history.push(s, y);
        s_all.push_back(s);
        y_all.push_back(y);

        Eigen::VectorXd g(n);
        for (Eigen::Index i = 0; i < n; ++i) g[i] = gauss(rng);

        const std::size_t kept = std::min<std::size_t>(s_all.size(), memory);
        const std::vector<Eigen::VectorXd> s_window(s_all.end() - kept, s_all.end());
        const std::vector<Eigen::VectorXd> y_window(y_all.end() - kept, y_all.end());

        const Eigen::VectorXd fast = lbfgs_direction(history, g);
        const Eigen::VectorXd dense = dense_bfgs_direction(s_window, y_window, g);
        CHECK((fast - dense).cwiseAbs().maxCoeff() < 1e-12 * dense.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("an unconstrained parabola is solved to stationarity") {
    const auto objective = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        if (g) (*g)[0] = 2.0 * (x[0] - 3.0);
        return (x[0] - 3.0) * (x[0] - 3.0);
    };
    const InversionState state =
        minimize(objective, Eigen::VectorXd::Zero(1), {-10.0, 10.0});
    CHECK(state.model[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(state.stop_reason != "");
    CHECK(state.iterations == static_cast<int>(state.trace.size()) - 1);
}

TEST_CASE("a minimum beyond the box lands exactly on the bound") {
    const auto objective = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        if (g) (*g)[0] = 2.0 * (x[0] - 2.0);
        return (x[0] - 2.0) * (x[0] - 2.0);
    };
    const InversionState state =
        minimize(objective, Eigen::VectorXd::Constant(1, 0.5), {0.0, 1.2});
    CHECK(state.model[0] == 1.2);
}

TEST_CASE("rosenbrock converges inside a box") {
    OptimizeOptions options;
    options.max_iterations = 200;
    Eigen::VectorXd start(2);
    start << -1.2, 1.0;

    const InversionState state = minimize(rosenbrock, start, {-2.0, 2.0}, options);
    CHECK(state.objective < 1e-10);
    CHECK(state.model[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(state.model[1] == doctest::Approx(1.0).epsilon(1e-4));

    REQUIRE(!state.trace.empty());
    CHECK(state.trace.front().normalized_objective == 1.0);
    for (std::size_t k = 1; k < state.trace.size(); ++k) {
        CHECK(state.trace[k].objective <= state.trace[k - 1].objective);
    }
}

TEST_CASE("every evaluated model satisfies the bounds") {
    const BoxBounds bounds{0.0, 1.2};
    bool violated = false;
    int evaluations = 0;
    const auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        ++evaluations;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] < bounds.lower || x[i] > bounds.upper) violated = true;
        }
        const Eigen::VectorXd d = x - Eigen::VectorXd::Constant(x.size(), 5.0);
        if (g) *g = 2.0 * d;
        return d.squaredNorm();
    };

    const InversionState state =
        minimize(objective, Eigen::VectorXd::Constant(4, 0.3), bounds);
    CHECK(!violated);
    CHECK(evaluations > 1);
    CHECK(state.model.maxCoeff() == 1.2);
}

TEST_CASE("iteration callbacks see every accepted step") {
    OptimizeOptions options;
    options.max_iterations = 8;
    std::vector<int> seen;
    const auto objective = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        if (g) *g = 2.0 * x;
        return x.squaredNorm();
    };
    const InversionState state =
        minimize(objective, Eigen::VectorXd::Constant(2, 1.0), {-2.0, 2.0}, options,
                 [&](const InversionState& s) { seen.push_back(s.iterations); });
    CHECK(static_cast<int>(seen.size()) == state.iterations);
    for (std::size_t k = 0; k < seen.size(); ++k) {
        CHECK(seen[k] == static_cast<int>(k) + 1);
    }
}

TEST_CASE("invalid bounds are rejected") {
    const auto objective = [](const Eigen::VectorXd& x, Eigen::VectorXd*) {
        return x.squaredNorm();
    };
    CHECK_THROWS_AS(minimize(objective, Eigen::VectorXd::Zero(1), {1.0, 1.0}), ConfigError);
}
