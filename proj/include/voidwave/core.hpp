#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace voidwave {

using Real = double;
using Index = std::int64_t;

// Thrown for invalid user input: malformed config files, bad CLI values,
// inconsistent experiment setups. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a solve goes numerically wrong (CFL blow-up, singular
// operator, non-finite values). CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Vec2 {
    Real x = 0.0;
    Real y = 0.0;

    Vec2() = default;
    Vec2(Real x_, Real y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(Real s) const { return {x * s, y * s}; }

    Real dot(const Vec2& o) const { return x * o.x + y * o.y; }
    Real norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(Real s, const Vec2& v) { return v * s; }

} // namespace voidwave
