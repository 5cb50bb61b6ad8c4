#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "beetle/core/dataset.hpp"
#include "beetle/core/random.hpp"
#include "beetle/core/sampling.hpp"
#include "beetle/learners/correlation.hpp"
#include "beetle/learners/gaussian_process.hpp"
#include "beetle/learners/linear_map.hpp"
#include "beetle/learners/regression_tree.hpp"
#include "beetle/metrics/metrics.hpp"

namespace beetle::baselines {

/// What every optimizer reports: the chosen target configuration, its NAR on
/// the full target dataset, and the measurements paid in each environment.
struct Outcome {
    Configuration configuration;
    std::size_t target_row = 0;
    double nar = 0.0;
    std::size_t source_measurements = 0;
    std::size_t target_measurements = 0;

    std::size_t total_measurements() const noexcept { return source_measurements + target_measurements; }
};

namespace detail {

inline void require_same_options(const EnvironmentDataset& a, const EnvironmentDataset& b) {
    if (!a.space().same_options(b.space())) {
        throw Error(ErrorKind::schema, "'" + a.env_id() + "' and '" + b.env_id() + "' have different options");
    }
}

template <typename Predict>
Outcome choose_best(const EnvironmentDataset& target, Predict&& predict) {
    std::vector<double> predicted;
    predicted.reserve(target.size());
    for (const auto& c : target.configurations()) predicted.push_back(predict(c));
    Outcome out;
    out.target_row = argbest(predicted);
    out.configuration = target.configuration(out.target_row);
    out.nar = metrics::nar_row(target, out.target_row);
    return out;
}

template <typename T>
void partial_shuffle(std::vector<T>& v, std::size_t take, std::uint64_t seed) {
    Rng rng(seed);
    take = std::min(take, v.size());
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, v.size() - 1);
        std::swap(v[i], v[pick(rng)]);
    }
    v.resize(take);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear-transform transfer: a Sobol-sampled source tree, mapped into the
// target by a least-squares line fitted on configurations measured in both.

struct ValovParams {
    int training_coefficient = 3;  // T: the tree sees T * option-count source rows
    std::size_t transfer_sample_count = 10;
    std::uint64_t seed = 0;
    learners::TreeParams tree;

    void validate() const {
        if (training_coefficient < 3 || training_coefficient > 5) {
            throw Error(ErrorKind::config, "training coefficient must be 3, 4 or 5");
        }
        if (transfer_sample_count < 2) throw Error(ErrorKind::config, "transfer sample count must be at least 2");
    }
};

struct ValovOutcome {
    Outcome outcome;
    learners::LinearMap map;
    learners::RegressionTree tree;
};

inline ValovOutcome valov_transfer(const EnvironmentDataset& source, const EnvironmentDataset& target,
                                   const ValovParams& p) {
    p.validate();
    detail::require_same_options(source, target);
    SampleLedger source_ledger(source), target_ledger(target);

    const std::size_t train_count = static_cast<std::size_t>(p.training_coefficient) * source.space().size();
    const auto train_rows = sample_sobol(source, source_ledger, std::max<std::size_t>(train_count, 1),
                                         derive_seed(p.seed, 1));
    auto tree = learners::train_regression_tree(source, train_rows, p.tree);

    std::vector<std::pair<std::size_t, std::size_t>> shared;
    for (std::size_t r = 0; r < source.size(); ++r) {
        if (auto t = target.find(source.configuration(r))) shared.emplace_back(r, *t);
    }
    if (shared.size() < p.transfer_sample_count) {
        throw Error(ErrorKind::pairing, std::to_string(shared.size()) + " configurations are measured in both '" +
                                            source.env_id() + "' and '" + target.env_id() + "', need " +
                                            std::to_string(p.transfer_sample_count));
    }
    detail::partial_shuffle(shared, p.transfer_sample_count, derive_seed(p.seed, 2));
    std::vector<double> s_perf, t_perf;
    for (auto [s, t] : shared) {
        source_ledger.reveal(s);
        target_ledger.reveal(t);
        s_perf.push_back(source.value(s));
        t_perf.push_back(target.value(t));
    }
    const auto map = learners::train_linear_map(s_perf, t_perf);

    ValovOutcome out{detail::choose_best(target, [&](const Configuration& c) { return map(tree.predict(c)); }),
                     map, std::move(tree)};
    out.outcome.source_measurements = source_ledger.cost();
    out.outcome.target_measurements = target_ledger.cost();
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian-process transfer: a GP on source samples whose cross-environment
// covariance is scaled by the source/target performance correlation.

struct GPTransferParams {
    std::size_t source_budget = 20;
    std::size_t target_budget = 10;
    std::uint64_t seed = 0;
    bool train_on_target = false;  // also fit the GP on the target samples
    learners::GPParams gp;

    void validate() const {
        if (source_budget < 2) throw Error(ErrorKind::config, "GP source budget must be at least 2");
        if (target_budget < 2) throw Error(ErrorKind::config, "GP target budget must be at least 2");
    }
};

struct GPTransferOutcome {
    Outcome outcome;
    double correlation = 0.0;
    bool correlation_fallback = false;  // correlation was undefined; scale 1.0 used
    learners::GaussianProcess model;
};

inline GPTransferOutcome gp_transfer(const EnvironmentDataset& source, const EnvironmentDataset& target,
                                     const GPTransferParams& p) {
    p.validate();
    detail::require_same_options(source, target);
    SampleLedger source_ledger(source), target_ledger(target);
    const auto s_rows = sample_random(source, source_ledger, p.source_budget, derive_seed(p.seed, 1));

    // Target samples come from configurations already sampled in the source
    // first, so the correlation is computed on paired measurements.
    std::vector<std::pair<std::size_t, std::size_t>> paired;
    for (auto s : s_rows) {
        if (auto t = target.find(source.configuration(s))) paired.emplace_back(s, *t);
    }
    std::sort(paired.begin(), paired.end());
    detail::partial_shuffle(paired, p.target_budget, derive_seed(p.seed, 2));
    for (auto [s, t] : paired) target_ledger.reveal(t);
    if (target_ledger.revealed_count() < p.target_budget) {
        sample_random(target, target_ledger, p.target_budget - target_ledger.revealed_count(), derive_seed(p.seed, 3));
    }
    if (paired.size() < 2) {
        throw Error(ErrorKind::pairing, "fewer than 2 sampled configurations are measured in both '" +
                                            source.env_id() + "' and '" + target.env_id() + "'");
    }

    GPTransferOutcome out;
    std::vector<double> s_perf, t_perf;
    for (auto [s, t] : paired) {
        s_perf.push_back(source.value(s));
        t_perf.push_back(target.value(t));
    }
    try {
        out.correlation = learners::performance_correlation(s_perf, t_perf);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::undefined_metric) throw;
        out.correlation = 1.0;
        out.correlation_fallback = true;
    }

    std::vector<Configuration> xs;
    std::vector<double> ys;
    std::vector<learners::Task> tasks;
    for (auto s : s_rows) {
        xs.push_back(source.configuration(s));
        ys.push_back(source.value(s));
        tasks.push_back(learners::Task::source);
    }
    if (p.train_on_target) {
        for (auto t : target_ledger.revealed()) {
            xs.push_back(target.configuration(t));
            ys.push_back(target.value(t));
            tasks.push_back(learners::Task::target);
        }
    }
    const auto space = source.space().merged(target.space());
    learners::TransferKernel kernel;
    kernel.scale = out.correlation;
    out.model = learners::GaussianProcess::fit(space, xs, ys, tasks, kernel, p.gp);
    out.outcome = detail::choose_best(target, [&](const Configuration& c) { return out.model.predict(c); });
    out.outcome.source_measurements = source_ledger.cost();
    out.outcome.target_measurements = target_ledger.cost();
    return out;
}

// ---------------------------------------------------------------------------
// Non-transfer optimizer: sample the target itself, fit a tree, and pick the
// best predicted unmeasured configuration unless a measured one already beats it.

inline Outcome nair_optimize(const EnvironmentDataset& target, std::size_t sample_count, std::uint64_t seed,
                             const learners::TreeParams& tree = {}) {
    if (sample_count < 2) throw Error(ErrorKind::config, "non-transfer sample count must be at least 2");
    sample_count = std::min(sample_count, target.size());
    SampleLedger ledger(target);
    auto rows = sample_random(target, ledger, sample_count, seed);
    std::sort(rows.begin(), rows.end());
    const auto model = learners::train_regression_tree(target, rows, tree);

    std::size_t sampled_best = rows[0];
    for (auto r : rows) {
        if (target.value(r) < target.value(sampled_best)) sampled_best = r;
    }
    std::size_t pick = sampled_best;
    const auto unmeasured = ledger.unrevealed();
    if (!unmeasured.empty()) {
        std::vector<double> predicted;
        predicted.reserve(unmeasured.size());
        for (auto r : unmeasured) predicted.push_back(model.predict(target.configuration(r)));
        const std::size_t i = argbest(predicted);
        if (predicted[i] < target.value(sampled_best)) pick = unmeasured[i];
    }
    Outcome out;
    out.target_row = pick;
    out.configuration = target.configuration(pick);
    out.nar = metrics::nar_row(target, pick);
    out.target_measurements = ledger.cost();
    return out;
}

}  // namespace beetle::baselines
