#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "beetle/core/error.hpp"

namespace beetle::stats {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw Error(ErrorKind::insufficient_data, "mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Population variance.
inline double variance(std::span<const double> xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size());
}

inline double stddev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

/// Linear-interpolated percentile, q in [0, 1] (numpy's default method).
inline double percentile(std::span<const double> xs, double q) {
    if (xs.empty()) throw Error(ErrorKind::insufficient_data, "percentile of empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + (v[hi] - v[lo]) * frac;
}

inline double median(std::span<const double> xs) { return percentile(xs, 0.5); }

struct Quartiles {
    double p25;
    double p50;
    double p75;

    double iqr() const noexcept { return p75 - p25; }
};

inline Quartiles quartiles(std::span<const double> xs) {
    return {percentile(xs, 0.25), percentile(xs, 0.5), percentile(xs, 0.75)};
}

/// Ranks starting at 1; tied values share their average rank.
inline std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace beetle::stats
