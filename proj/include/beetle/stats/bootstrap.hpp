#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "beetle/core/random.hpp"
#include "beetle/stats/summary.hpp"

namespace beetle::stats {

struct BootstrapParams {
    std::size_t iterations = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
};

namespace detail {

inline double sample_variance(std::span<const double> xs, double m) {
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

// |mean difference| over its standard error; a zero standard error gives 0
// for equal means and +inf otherwise.
inline double separation(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x), my = mean(y);
    const double diff = std::abs(mx - my);
    const double se2 = sample_variance(x, mx) / static_cast<double>(x.size()) +
                       sample_variance(y, my) / static_cast<double>(y.size());
    if (se2 <= 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / std::sqrt(se2);
}

}  // namespace detail

/// Two-sided bootstrap test of a difference in means (Efron & Tibshirani's
/// shifted two-sample bootstrap). Both samples are recentred on the pooled
/// mean; the p-value is the share of resamples separating at least as
/// strongly as the observed data. True when p < alpha.
inline bool bootstrap_significant(std::span<const double> x, std::span<const double> y,
                                  const BootstrapParams& params = {}) {
    if (x.size() < 3 || y.size() < 3) {
        throw Error(ErrorKind::insufficient_data, "bootstrap test needs at least 3 values per sample");
    }
    if (params.iterations < 100) throw Error(ErrorKind::config, "bootstrap needs at least 100 iterations");
    if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw Error(ErrorKind::config, "alpha must be in (0,1)");

    const double observed = detail::separation(x, y);
    const double mx = mean(x), my = mean(y);
    const double pooled = (mx * static_cast<double>(x.size()) + my * static_cast<double>(y.size())) /
                          static_cast<double>(x.size() + y.size());
    std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
    for (auto& v : xs) v = v - mx + pooled;
    for (auto& v : ys) v = v - my + pooled;

    Rng rng(params.seed);
    std::uniform_int_distribution<std::size_t> pick_x(0, xs.size() - 1), pick_y(0, ys.size() - 1);
    std::vector<double> bx(xs.size()), by(ys.size());
    std::size_t at_least = 0;
    for (std::size_t b = 0; b < params.iterations; ++b) {
        for (auto& v : bx) v = xs[pick_x(rng)];
        for (auto& v : by) v = ys[pick_y(rng)];
        if (detail::separation(bx, by) >= observed) ++at_least;
    }
    const double p = static_cast<double>(at_least) / static_cast<double>(params.iterations);
    return p < params.alpha;
}

}  // namespace beetle::stats
