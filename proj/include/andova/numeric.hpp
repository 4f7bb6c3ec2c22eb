#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace andova::numeric {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_gamma(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

inline double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace andova::numeric
