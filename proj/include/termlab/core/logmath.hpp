#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace termlab {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

/// log(sigmoid(z)) without overflow for large |z|.
inline double log_sigmoid(double z) {
    return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

/// log(1 - exp(x)) for x < 0.
inline double log1mexp(double x) {
    constexpr double ln2 = 0.6931471805599453;
    return x > -ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

inline double logsumexp2(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

} // namespace termlab
