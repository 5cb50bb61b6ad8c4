#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "beetle/core/dataset.hpp"
#include "beetle/stats/summary.hpp"

namespace beetle::metrics {

/// Normalized absolute residual of choosing `row`, over the rows listed in
/// `among`: 0 when it ties the best of them, 100 when it ties the worst.
inline double nar_over(const EnvironmentDataset& ds, std::span<const std::size_t> among, std::size_t row) {
    if (among.empty()) throw Error(ErrorKind::insufficient_data, "NAR over an empty row set");
    double best = ds.value(among[0]), worst = best;
    for (auto r : among) {
        best = std::min(best, ds.value(r));
        worst = std::max(worst, ds.value(r));
    }
    if (worst == best) {
        throw Error(ErrorKind::undefined_metric, "NAR undefined: flat performance in '" + ds.env_id() + "'");
    }
    return std::abs(ds.value(row) - best) / (worst - best) * 100.0;
}

/// NAR of a row against the whole dataset.
inline double nar_row(const EnvironmentDataset& ds, std::size_t row) {
    const auto values = ds.values();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*hi == *lo) {
        throw Error(ErrorKind::undefined_metric, "NAR undefined: flat performance in '" + ds.env_id() + "'");
    }
    return std::abs(ds.value(row) - *lo) / (*hi - *lo) * 100.0;
}

/// NAR of a predicted optimal configuration; it must be a measured row.
inline double nar(const EnvironmentDataset& ds, const Configuration& predicted) {
    return nar_row(ds, ds.row_of(predicted));
}

/// Mean magnitude of relative error, in percent.
inline double mmre(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw Error(ErrorKind::schema, "MMRE inputs differ in length");
    if (actual.empty()) throw Error(ErrorKind::insufficient_data, "MMRE of empty sequences");
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw Error(ErrorKind::undefined_metric, "MMRE undefined for an actual value of 0");
        total += std::abs(predicted[i] - actual[i]) / std::abs(actual[i]);
    }
    return total / static_cast<double>(actual.size()) * 100.0;
}

/// Mean absolute gap between each row's rank by actual value and its rank by
/// prediction (ties share the average rank).
inline double rank_difference(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw Error(ErrorKind::schema, "rank inputs differ in length");
    if (actual.empty()) throw Error(ErrorKind::insufficient_data, "rank difference of empty sequences");
    const auto rp = stats::average_ranks(predicted);
    const auto ra = stats::average_ranks(actual);
    double total = 0.0;
    for (std::size_t i = 0; i < rp.size(); ++i) total += std::abs(rp[i] - ra[i]);
    return total / static_cast<double>(rp.size());
}

/// Rank difference of a model (anything with predict(Configuration)) on a dataset.
template <typename Model>
double rank_difference(const Model& model, const EnvironmentDataset& ds) {
    std::vector<double> predicted;
    predicted.reserve(ds.size());
    for (const auto& c : ds.configurations()) predicted.push_back(model.predict(c));
    return rank_difference(std::span<const double>(predicted), ds.values());
}

}  // namespace beetle::metrics
