#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "beetle/stats/summary.hpp"

namespace beetle::stats {

inline double yeo_johnson_value(double x, double lambda) {
    constexpr double eps = 1e-12;
    if (x >= 0.0) {
        if (std::abs(lambda) < eps) return std::log1p(x);
        return (std::pow(x + 1.0, lambda) - 1.0) / lambda;
    }
    if (std::abs(lambda - 2.0) < eps) return -std::log1p(-x);
    return -(std::pow(1.0 - x, 2.0 - lambda) - 1.0) / (2.0 - lambda);
}

struct PowerTransform {
    double lambda = 1.0;
    std::vector<double> values;
};

/// Profile log-likelihood of the Yeo-Johnson transform at `lambda`.
inline double yeo_johnson_log_likelihood(std::span<const double> xs, double lambda) {
    std::vector<double> t(xs.size());
    double jacobian = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        t[i] = yeo_johnson_value(xs[i], lambda);
        jacobian += std::copysign(std::log1p(std::abs(xs[i])), xs[i]);
    }
    const double var = variance(t);
    if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(xs.size());
    return -n / 2.0 * std::log(var) + (lambda - 1.0) * jacobian;
}

/// Yeo-Johnson transform with lambda picked from {-2.0, -1.9, ..., 2.0} by
/// maximum likelihood. Constant samples come back unchanged (lambda = 1).
inline PowerTransform yeo_johnson(std::span<const double> xs) {
    if (xs.empty()) throw Error(ErrorKind::insufficient_data, "power transform of empty sample");
    PowerTransform out;
    out.values.assign(xs.begin(), xs.end());
    if (variance(xs) == 0.0) return out;

    double best_ll = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
        const double lambda = static_cast<double>(i - 20) / 10.0;
        const double ll = yeo_johnson_log_likelihood(xs, lambda);
        if (ll > best_ll) {
            best_ll = ll;
            out.lambda = lambda;
        }
    }
    for (std::size_t i = 0; i < xs.size(); ++i) out.values[i] = yeo_johnson_value(xs[i], out.lambda);
    return out;
}

}  // namespace beetle::stats
