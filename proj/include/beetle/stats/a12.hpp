#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "beetle/core/error.hpp"

namespace beetle::stats {

/// Vargha-Delaney A12: probability that a value drawn from `x` exceeds one
/// drawn from `y`, counting ties as half.
inline double a12(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw Error(ErrorKind::insufficient_data, "a12 of an empty sample");
    std::vector<double> ys(y.begin(), y.end());
    std::sort(ys.begin(), ys.end());
    double score = 0.0;
    for (double xi : x) {
        const auto lo = std::lower_bound(ys.begin(), ys.end(), xi);
        const auto hi = std::upper_bound(lo, ys.end(), xi);
        score += static_cast<double>(lo - ys.begin()) + 0.5 * static_cast<double>(hi - lo);
    }
    return score / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

}  // namespace beetle::stats
