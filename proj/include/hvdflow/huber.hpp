#pragma once

#include <cmath>

namespace hvdflow {

// Differentiable l1 surrogate: quadratic inside eps, linear outside.
inline double huber_value(double x, double eps) {
    const double a = std::fabs(x);
    return a <= eps ? (x * x) / (2.0 * eps) : a - 0.5 * eps;
}

inline double huber_deriv(double x, double eps) {
    return x / std::max(std::fabs(x), eps);
}

}  // namespace hvdflow
