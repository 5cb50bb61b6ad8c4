#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/random/sobol.hpp>

#include "beetle/core/dataset.hpp"
#include "beetle/core/random.hpp"

namespace beetle {

/// Reveals up to `k` unrevealed rows chosen uniformly without replacement.
inline std::vector<std::size_t> sample_random(const EnvironmentDataset& ds, SampleLedger& ledger,
                                              std::size_t k, std::uint64_t seed) {
    if (ledger.size() != ds.size()) throw Error(ErrorKind::config, "ledger does not belong to dataset");
    std::vector<std::size_t> pool = ledger.unrevealed();
    const std::size_t take = std::min(k, pool.size());
    Rng rng(seed);
    // Partial Fisher-Yates: the first `take` slots become the sample.
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(take);
    for (auto row : pool) ledger.reveal(row);
    return pool;
}

/// First `k` points of the Sobol sequence in [0,1)^dims, starting at the origin.
inline std::vector<std::vector<double>> sobol_points(std::size_t dims, std::size_t k) {
    std::vector<std::vector<double>> points;
    if (k == 0 || dims == 0) return points;
    points.reserve(k);
    points.emplace_back(dims, 0.0);
    boost::random::sobol engine(dims);
    // The engine emits 64-bit integers and skips the origin.
    while (points.size() < k) {
        std::vector<double> p(dims);
        for (auto& x : p) x = std::ldexp(static_cast<double>(engine()), -64);
        points.push_back(std::move(p));
    }
    return points;
}

namespace detail {

inline double sobol_distance(const ConfigurationSpace& space, bool binary,
                             const std::vector<double>& target, const Configuration& c) {
    double d = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (binary) {
            d += (target[i] != c[i]) ? 1.0 : 0.0;
        } else {
            const double diff = target[i] - c[i];
            d += diff * diff;
        }
    }
    return d;
}

}  // namespace detail

/// Sobol-spread sample: each point is scaled into the option ranges and
/// snapped to the nearest unrevealed measured row (Hamming distance when
/// every option is binary, Euclidean otherwise). Rows are revealed in the
/// ledger; if the points run out of distinct rows the rest is drawn at random.
inline std::vector<std::size_t> sample_sobol(const EnvironmentDataset& ds, SampleLedger& ledger,
                                             std::size_t k, std::uint64_t seed) {
    if (k == 0) throw Error(ErrorKind::config, "sobol sample size must be at least 1");
    const auto& space = ds.space();
    const bool binary = space.all_binary();
    const std::size_t want = std::min(k, ledger.unrevealed_count());
    std::vector<std::size_t> picked;
    picked.reserve(want);

    for (const auto& point : sobol_points(space.size(), want)) {
        std::vector<double> target(space.size());
        for (std::size_t i = 0; i < space.size(); ++i) {
            const auto& dom = space.domain(i);
            target[i] = binary ? (point[i] >= 0.5 ? 1.0 : 0.0)
                               : dom.min() + point[i] * (dom.max() - dom.min());
        }
        std::size_t best = ds.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t row = 0; row < ds.size(); ++row) {
            if (ledger.is_revealed(row)) continue;
            const double d = detail::sobol_distance(space, binary, target, ds.configuration(row));
            if (d < best_d) {
                best_d = d;
                best = row;
            }
        }
        if (best == ds.size()) break;
        ledger.reveal(best);
        picked.push_back(best);
    }
    if (picked.size() < want) {
        auto extra = sample_random(ds, ledger, want - picked.size(), seed);
        picked.insert(picked.end(), extra.begin(), extra.end());
    }
    return picked;
}

inline std::vector<std::size_t> sample_sobol(const EnvironmentDataset& ds, std::size_t k,
                                             std::uint64_t seed) {
    SampleLedger ledger(ds);
    return sample_sobol(ds, ledger, k, seed);
}

}  // namespace beetle
