#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "beetle/core/dataset.hpp"
#include "beetle/core/random.hpp"
#include "beetle/core/sampling.hpp"
#include "beetle/learners/regression_tree.hpp"
#include "beetle/metrics/metrics.hpp"
#include "beetle/stats/summary.hpp"
#include "beetle/stats/yeo_johnson.hpp"

namespace beetle {

enum class Aggregate { median, mean };

inline Aggregate parse_aggregate(const std::string& s) {
    if (s == "median") return Aggregate::median;
    if (s == "mean") return Aggregate::mean;
    throw Error(ErrorKind::config, "unknown aggregate '" + s + "' (expected median or mean)");
}

struct DiscoveryParams {
    double step_size = 0.01;  // fraction of each environment's rows revealed per round
    double budget = 0.10;     // cap on revealed rows, as a fraction of all rows
    std::size_t lives = 5;
    std::uint64_t seed = 0;
    std::size_t min_train = 5;  // revealed rows every survivor needs before scoring
    Aggregate aggregate = Aggregate::median;
    learners::TreeParams tree;

    void validate() const {
        if (!(step_size > 0.0 && step_size <= 1.0)) throw Error(ErrorKind::config, "step_size must be in (0, 1]");
        if (!(budget > 0.0 && budget <= 1.0)) throw Error(ErrorKind::config, "budget must be in (0, 1]");
        if (lives < 1) throw Error(ErrorKind::config, "lives must be at least 1");
        if (min_train < 1) throw Error(ErrorKind::config, "min_train must be at least 1");
    }
};

/// An environment with the rows measured in it so far.
struct Probe {
    const EnvironmentDataset* data;
    const SampleLedger* ledger;
};

/// How well a model trained on the source's revealed rows finds the best
/// revealed row of each target: the median (or mean) NAR over targets, with
/// NAR normalized over each target's revealed rows. Targets whose revealed
/// rows are flat are skipped.
inline double score_source(const Probe& source, std::span<const Probe> targets,
                           const learners::TreeParams& tree = {}, Aggregate aggregate = Aggregate::median,
                           std::size_t min_train = 5) {
    const auto& rows = source.ledger->revealed();
    if (rows.size() < std::max<std::size_t>(min_train, 1)) {
        throw Error(ErrorKind::insufficient_data, "source '" + source.data->env_id() + "' has " +
                                                      std::to_string(rows.size()) + " revealed rows, need " +
                                                      std::to_string(min_train));
    }
    const auto model = learners::train_regression_tree(*source.data, rows, tree);

    std::vector<double> nars;
    for (const auto& t : targets) {
        std::vector<std::size_t> revealed = t.ledger->revealed();
        if (revealed.size() < 2) continue;
        std::sort(revealed.begin(), revealed.end());
        const auto [lo, hi] = std::minmax_element(revealed.begin(), revealed.end(), [&](auto a, auto b) {
            return t.data->value(a) < t.data->value(b);
        });
        if (t.data->value(*lo) == t.data->value(*hi)) continue;
        std::vector<double> predicted;
        predicted.reserve(revealed.size());
        for (auto r : revealed) predicted.push_back(model.predict(t.data->configuration(r)));
        const std::size_t pick = revealed[argbest(predicted)];
        nars.push_back(metrics::nar_over(*t.data, revealed, pick));
    }
    if (nars.empty()) {
        throw Error(ErrorKind::undefined_metric,
                    "no target with non-flat revealed rows to score '" + source.data->env_id() + "'");
    }
    return aggregate == Aggregate::median ? stats::median(nars) : stats::mean(nars);
}

struct EnvironmentScore {
    std::string env_id;
    double score;
};

struct DiscoveryRound {
    std::size_t index = 0;
    std::size_t cost = 0;             // cumulative measurements after this round
    double revealed_fraction = 0.0;   // cost / all rows
    bool scored = false;              // false during warm-up rounds
    std::vector<EnvironmentScore> scores;
    double threshold = 0.0;           // mu + sigma of the transformed scores
    std::vector<std::string> eliminated;
    std::size_t lives_remaining = 0;
};

struct BellwetherReport {
    std::string bellwether_id;
    bool scored = false;  // false: budget ran out before any round could be scored
    std::vector<DiscoveryRound> rounds;
    std::vector<std::string> survivors;
    std::vector<std::pair<std::string, std::size_t>> env_costs;
    std::size_t total_cost = 0;
    std::size_t total_rows = 0;
    std::size_t budget_rows = 0;
};

struct Discovery {
    BellwetherReport report;
    std::vector<SampleLedger> ledgers;  // aligned with the input sources
    std::size_t bellwether = 0;         // index into the input sources

    const SampleLedger& bellwether_ledger() const { return ledgers[bellwether]; }
};

/// Rows one discovery step reveals in an environment of `rows` rows.
inline std::size_t step_rows(double step_size, std::size_t rows) {
    const auto n = static_cast<std::size_t>(std::floor(step_size * static_cast<double>(rows) + 1e-9));
    return std::clamp<std::size_t>(n, 1, rows);
}

/// Incremental bellwether search. Every round reveals `step_size` more rows of
/// each surviving environment, scores each survivor against all the others,
/// power-transforms the scores and drops survivors above mu + sigma. A round
/// that drops nobody costs a life. The search ends when lives run out, the
/// next round would exceed the budget, or one survivor is left; the
/// lowest-scoring survivor is the bellwether (ties by env_id).
inline Discovery find_bellwether(std::span<const EnvironmentDataset> sources, const DiscoveryParams& params) {
    params.validate();
    if (sources.size() < 2) throw Error(ErrorKind::config, "bellwether discovery needs at least 2 environments");
    for (const auto& s : sources) {
        if (!s.space().same_options(sources[0].space())) {
            throw Error(ErrorKind::schema, "environment '" + s.env_id() + "' has different options");
        }
    }

    Discovery out;
    auto& report = out.report;
    for (const auto& s : sources) {
        out.ledgers.emplace_back(s);
        report.total_rows += s.size();
    }
    report.budget_rows =
        static_cast<std::size_t>(std::floor(params.budget * static_cast<double>(report.total_rows) + 1e-9));

    std::vector<std::size_t> survivors(sources.size());
    std::iota(survivors.begin(), survivors.end(), std::size_t{0});
    std::sort(survivors.begin(), survivors.end(),
              [&](std::size_t a, std::size_t b) { return sources[a].env_id() < sources[b].env_id(); });

    std::vector<std::size_t> steps(sources.size());
    std::size_t first_round = 0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        steps[i] = step_rows(params.step_size, sources[i].size());
        first_round += steps[i];
    }
    if (first_round > report.budget_rows) {
        throw Error(ErrorKind::budget, "budget of " + std::to_string(report.budget_rows) +
                                           " measurements is below the first round's cost of " +
                                           std::to_string(first_round));
    }

    std::size_t lives = params.lives;
    std::vector<double> last_scores(sources.size(), 0.0);
    std::size_t round_index = 0;
    while (lives > 0 && survivors.size() >= 2) {
        std::size_t round_cost = 0;
        for (auto s : survivors) round_cost += std::min(steps[s], out.ledgers[s].unrevealed_count());
        if (round_cost == 0 || report.total_cost + round_cost > report.budget_rows) break;

        DiscoveryRound round;
        round.index = ++round_index;
        for (auto s : survivors) {
            sample_random(sources[s], out.ledgers[s], steps[s], derive_seed(params.seed, round.index * 7919 + s));
        }
        report.total_cost += round_cost;
        round.cost = report.total_cost;
        round.revealed_fraction = static_cast<double>(report.total_cost) / static_cast<double>(report.total_rows);

        const bool warm_up = std::any_of(survivors.begin(), survivors.end(), [&](std::size_t s) {
            return out.ledgers[s].revealed_count() < params.min_train;
        });
        std::vector<double> scores;
        if (!warm_up) {
            try {
                for (auto s : survivors) {
                    std::vector<Probe> targets;
                    for (auto t : survivors) {
                        if (t != s) targets.push_back({&sources[t], &out.ledgers[t]});
                    }
                    scores.push_back(score_source({&sources[s], &out.ledgers[s]}, targets, params.tree,
                                                  params.aggregate, params.min_train));
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::undefined_metric) throw;
                scores.clear();
            }
        }

        if (!scores.empty()) {
            round.scored = true;
            report.scored = true;
            for (std::size_t i = 0; i < survivors.size(); ++i) {
                round.scores.push_back({sources[survivors[i]].env_id(), scores[i]});
                last_scores[survivors[i]] = scores[i];
            }
            const auto transformed = stats::yeo_johnson(scores).values;
            round.threshold = stats::mean(transformed) + stats::stddev(transformed);
            // With two survivors mu + sigma equals the larger score; rounding must not eliminate it.
            const double slack = 1e-9 * std::max(1.0, std::abs(round.threshold));
            std::vector<std::size_t> kept;
            for (std::size_t i = 0; i < survivors.size(); ++i) {
                if (transformed[i] > round.threshold + slack) {
                    round.eliminated.push_back(sources[survivors[i]].env_id());
                } else {
                    kept.push_back(survivors[i]);
                }
            }
            survivors = std::move(kept);
            if (round.eliminated.empty()) --lives;
        }
        round.lives_remaining = lives;
        report.rounds.push_back(std::move(round));
    }

    std::size_t best = survivors.front();
    if (report.scored) {
        for (auto s : survivors) {
            if (last_scores[s] < last_scores[best]) best = s;
        }
    }
    out.bellwether = best;
    report.bellwether_id = sources[best].env_id();
    for (auto s : survivors) report.survivors.push_back(sources[s].env_id());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        report.env_costs.emplace_back(sources[i].env_id(), out.ledgers[i].cost());
    }
    return out;
}

}  // namespace beetle
