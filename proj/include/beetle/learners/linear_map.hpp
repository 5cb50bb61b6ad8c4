#pragma once

#include <span>

#include "beetle/core/error.hpp"

namespace beetle::learners {

struct LinearMap {
    double slope = 1.0;
    double intercept = 0.0;

    double operator()(double x) const noexcept { return slope * x + intercept; }
};

/// Ordinary least squares fit of y on x.
inline LinearMap train_linear_map(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::schema, "linear fit inputs differ in length");
    if (x.size() < 2) throw Error(ErrorKind::degenerate_fit, "linear fit needs at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw Error(ErrorKind::degenerate_fit, "all x values are equal; slope undefined");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace beetle::learners
