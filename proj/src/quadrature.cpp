#include "voidwave/quadrature.hpp"

#include <cmath>

namespace voidwave {

namespace {

// Value and derivative of the Legendre polynomial P_n at x via the
// three-term recurrence.
void legendre(int n, Real x, Real& p, Real& dp) {
    Real p0 = 1.0, p1 = x;
    if (n == 0) {
        p = p0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    if (std::abs(x) == 1.0) {
        dp = x * std::pow(x, n) * 0.5 * n * (n + 1); // endpoint limit
    } else {
        dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
}

} // namespace

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw ConfigError("gauss_legendre: need at least one point");
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        Real x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        Real p = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            legendre(n, x, p, dp);
            const Real dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre(n, x, p, dp);
        rule.points[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Enforce exact symmetry (Newton converges to slightly asymmetric pairs).
    for (int i = 0; i < n / 2; ++i) {
        const Real x = 0.5 * (rule.points[n - 1 - i] - rule.points[i]);
        const Real w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.0;
    return rule;
}

QuadratureRule gauss_lobatto(int n) {
    if (n < 2) throw ConfigError("gauss_lobatto: need at least two points");
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    rule.points.front() = -1.0;
    rule.points.back() = 1.0;
    const int m = n - 1;
    // Interior points are the roots of P'_{n-1}; Newton on dP with the
    // derivative of dP obtained from the Legendre ODE.
    for (int i = 1; i < m; ++i) {
        Real x = std::cos(M_PI * (m - i) / m); // Chebyshev-Lobatto guess
        for (int it = 0; it < 100; ++it) {
            Real p = 0.0, dp = 0.0;
            legendre(m, x, p, dp);
            const Real d2p = (2.0 * x * dp - m * (m + 1) * p) / (1.0 - x * x);
            const Real dx = dp / d2p;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.points[i] = x;
    }
    for (int i = 0; i < n / 2; ++i) {
        const Real x = 0.5 * (rule.points[n - 1 - i] - rule.points[i]);
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.0;
    for (int i = 0; i < n; ++i) {
        Real p = 0.0, dp = 0.0;
        legendre(m, rule.points[i], p, dp);
        rule.weights[i] = 2.0 / (m * (m + 1) * p * p);
    }
    return rule;
}

} // namespace voidwave
