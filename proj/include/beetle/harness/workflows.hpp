#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "beetle/baselines/baselines.hpp"
#include "beetle/bellwether/beetle.hpp"
#include "beetle/harness/parallel.hpp"
#include "beetle/stats/scott_knott.hpp"

namespace beetle::harness {

enum class RepeatMode { resample, reseed };

inline RepeatMode parse_repeat_mode(const std::string& s) {
    if (s == "resample") return RepeatMode::resample;
    if (s == "reseed") return RepeatMode::reseed;
    throw Error(ErrorKind::config, "unknown repeat mode '" + s + "' (expected resample or reseed)");
}

inline std::string to_string(RepeatMode m) { return m == RepeatMode::resample ? "resample" : "reseed"; }

struct RunOptions {
    std::size_t repeats = 30;
    std::uint64_t seed = 0;
    RepeatMode mode = RepeatMode::resample;
    std::size_t jobs = 1;

    // resample: seed + repeat; reseed: the base seed every time.
    std::uint64_t repeat_seed(std::size_t repeat) const { return mode == RepeatMode::resample ? seed + repeat : seed; }

    void validate() const {
        if (repeats < 1) throw Error(ErrorKind::config, "repeats must be at least 1");
    }
};

namespace detail {

inline void require_environments(std::span<const EnvironmentDataset> envs) {
    if (envs.size() < 2) {
        throw Error(ErrorKind::config, "workflow needs at least 2 environments, got " + std::to_string(envs.size()));
    }
}

inline std::vector<EnvironmentDataset> all_but(std::span<const EnvironmentDataset> envs, std::size_t skip) {
    std::vector<EnvironmentDataset> out;
    for (std::size_t i = 0; i < envs.size(); ++i) {
        if (i != skip) out.push_back(envs[i]);
    }
    return out;
}

inline std::size_t fraction_rows(double fraction, std::size_t rows) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows)));
}

// NAR on `target` of the row a tree trained on `rows` of `source` predicts best.
inline double transfer_nar(const EnvironmentDataset& source, const std::vector<std::size_t>& rows,
                           const EnvironmentDataset& target, const learners::TreeParams& tree) {
    const auto model = learners::train_regression_tree(source, rows, tree);
    return metrics::nar_row(target, argbest(model.predict(target.configurations())));
}

inline std::vector<std::size_t> all_rows(const EnvironmentDataset& ds) {
    std::vector<std::size_t> rows(ds.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
}

// Median over every other environment of the NAR reached by a tree on `rows` of envs[source].
inline double median_transfer_nar(std::span<const EnvironmentDataset> envs, std::size_t source,
                                  const std::vector<std::size_t>& rows, const learners::TreeParams& tree) {
    std::vector<double> nars;
    for (std::size_t t = 0; t < envs.size(); ++t) {
        if (t != source) nars.push_back(transfer_nar(envs[source], rows, envs[t], tree));
    }
    return stats::median(nars);
}

}  // namespace detail

/// Scores every environment as a source with all rows revealed everywhere.
inline std::vector<EnvironmentScore> exhaustive_scores(std::span<const EnvironmentDataset> envs,
                                                       const learners::TreeParams& tree = {},
                                                       Aggregate aggregate = Aggregate::median) {
    detail::require_environments(envs);
    std::vector<SampleLedger> ledgers;
    for (const auto& e : envs) {
        ledgers.emplace_back(e);
        for (std::size_t r = 0; r < e.size(); ++r) ledgers.back().reveal(r);
    }
    std::vector<EnvironmentScore> out;
    for (std::size_t s = 0; s < envs.size(); ++s) {
        std::vector<Probe> targets;
        for (std::size_t t = 0; t < envs.size(); ++t) {
            if (t != s) targets.push_back({&envs[t], &ledgers[t]});
        }
        out.push_back({envs[s].env_id(), score_source({&envs[s], &ledgers[s]}, targets, tree, aggregate, 1)});
    }
    return out;
}

/// Index of the lowest score; ties go to the smallest env_id.
inline std::size_t best_scored(const std::vector<EnvironmentScore>& scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i].score < scores[best].score ||
            (scores[i].score == scores[best].score && scores[i].env_id < scores[best].env_id)) {
            best = i;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Round robin: every environment as the only source for all the others.

struct SourceSample {
    std::string env_id;
    std::vector<double> values;  // one median-over-targets NAR per repeat
};

struct RoundRobinResult {
    double train_fraction = 1.0;
    std::vector<SourceSample> sources;
    stats::RankedGroups ranks;
};

inline RoundRobinResult run_roundrobin(std::span<const EnvironmentDataset> envs, const RunOptions& opts,
                                       double train_fraction = 1.0, const learners::TreeParams& tree = {},
                                       const stats::ScottKnottParams& sk = {}) {
    opts.validate();
    detail::require_environments(envs);
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw Error(ErrorKind::config, "train fraction must be in (0, 1]");
    }
    const std::size_t n = envs.size();
    const auto values = parallel_map(n * opts.repeats, opts.jobs, [&](std::size_t k) {
        const std::size_t s = k / opts.repeats, r = k % opts.repeats;
        std::vector<std::size_t> rows;
        if (train_fraction >= 1.0) {
            rows = detail::all_rows(envs[s]);
        } else {
            const auto count = std::max<std::size_t>(2, detail::fraction_rows(train_fraction, envs[s].size()));
            SampleLedger ledger(envs[s]);
            rows = sample_random(envs[s], ledger, std::min(count, envs[s].size()),
                                 derive_seed(opts.repeat_seed(r), s));
        }
        return detail::median_transfer_nar(envs, s, rows, tree);
    });

    RoundRobinResult out;
    out.train_fraction = train_fraction;
    stats::Treatments treatments;
    for (std::size_t s = 0; s < n; ++s) {
        SourceSample sample{envs[s].env_id(), {}};
        for (std::size_t r = 0; r < opts.repeats; ++r) sample.values.push_back(values[s * opts.repeats + r]);
        treatments.emplace_back(sample.env_id, sample.values);
        out.sources.push_back(std::move(sample));
    }
    auto params = sk;
    params.bootstrap.seed = derive_seed(opts.seed, 0x5c077);
    out.ranks = stats::scott_knott(treatments, params);
    return out;
}

// ---------------------------------------------------------------------------
// Discovery: the incremental search against the 100%-data bellwether.

struct DiscoveryRun {
    std::uint64_t seed = 0;
    BellwetherReport report;
    double nar = 0.0;            // median NAR over the other environments
    double cost_fraction = 0.0;  // measurements / all rows
};

struct DiscoveryResult {
    DiscoveryParams params;
    std::vector<EnvironmentScore> reference_scores;  // exhaustive, 100% data
    std::string reference_id;
    double reference_nar = 0.0;
    std::vector<DiscoveryRun> runs;
    std::size_t matches = 0;  // runs whose bellwether is the reference

    std::vector<double> nars() const {
        std::vector<double> v;
        for (const auto& r : runs) v.push_back(r.nar);
        return v;
    }
    std::vector<double> cost_fractions() const {
        std::vector<double> v;
        for (const auto& r : runs) v.push_back(r.cost_fraction);
        return v;
    }
};

inline DiscoveryResult run_discovery(std::span<const EnvironmentDataset> envs, const DiscoveryParams& params,
                                     const RunOptions& opts) {
    opts.validate();
    params.validate();
    detail::require_environments(envs);
    DiscoveryResult out;
    out.params = params;
    out.reference_scores = exhaustive_scores(envs, params.tree, params.aggregate);
    const std::size_t ref = best_scored(out.reference_scores);
    out.reference_id = envs[ref].env_id();
    out.reference_nar = detail::median_transfer_nar(envs, ref, detail::all_rows(envs[ref]), params.tree);

    out.runs = parallel_map(opts.repeats, opts.jobs, [&](std::size_t r) {
        DiscoveryParams p = params;
        p.seed = opts.repeat_seed(r);
        auto d = find_bellwether(envs, p);
        DiscoveryRun run;
        run.seed = p.seed;
        run.nar = detail::median_transfer_nar(envs, d.bellwether, d.bellwether_ledger().revealed(), params.tree);
        run.cost_fraction =
            static_cast<double>(d.report.total_cost) / static_cast<double>(d.report.total_rows);
        run.report = std::move(d.report);
        return run;
    });
    for (const auto& r : out.runs) out.matches += r.report.bellwether_id == out.reference_id ? 1 : 0;
    return out;
}

// ---------------------------------------------------------------------------
// Win/loss: BEETLE against the non-transfer optimizer at equal sampling fractions.

inline std::vector<double> default_fractions() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}; }

struct WinLossCell {
    double fraction = 0.0;
    std::size_t wins = 0;  // BEETLE's NAR <= the baseline's
    std::size_t losses = 0;
    std::vector<double> beetle_nar;
    std::vector<double> nair_nar;
    std::vector<double> beetle_cost;  // measurements per run
    std::vector<double> nair_cost;

    double win_share() const {
        const auto n = wins + losses;
        return n == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(n);
    }
};

struct WinLossResult {
    DiscoveryParams params;
    std::vector<WinLossCell> cells;
};

inline WinLossResult run_winloss(std::span<const EnvironmentDataset> envs, const DiscoveryParams& params,
                                 const RunOptions& opts, std::vector<double> fractions = default_fractions()) {
    opts.validate();
    params.validate();
    detail::require_environments(envs);
    if (fractions.empty()) throw Error(ErrorKind::config, "no sampling fractions given");
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw Error(ErrorKind::config, "sampling fractions must be in (0, 1]");
    }

    struct PairResult {
        std::vector<double> beetle_nar, nair_nar, beetle_cost, nair_cost;
    };
    const std::size_t n = envs.size();
    const auto pairs = parallel_map(n * opts.repeats, opts.jobs, [&](std::size_t k) {
        const std::size_t t = k / opts.repeats, r = k % opts.repeats;
        const auto sources = detail::all_but(envs, t);
        DiscoveryParams p = params;
        p.seed = derive_seed(opts.repeat_seed(r), t);
        const auto d = find_bellwether(sources, p);
        const auto& bellwether = sources[d.bellwether];
        PairResult pr;
        for (std::size_t f = 0; f < fractions.size(); ++f) {
            SampleLedger ledger = d.bellwether_ledger();
            const auto budget = std::max(params.min_train, detail::fraction_rows(fractions[f], bellwether.size()));
            const auto tr = transfer_to_target(bellwether, ledger, envs[t], std::min(budget, bellwether.size()),
                                               derive_seed(p.seed, 1 + f), params.tree);
            const auto nr = baselines::nair_optimize(
                envs[t], std::max<std::size_t>(2, detail::fraction_rows(fractions[f], envs[t].size())),
                derive_seed(p.seed, 1 + f), params.tree);
            pr.beetle_nar.push_back(tr.nar);
            pr.nair_nar.push_back(nr.nar);
            pr.beetle_cost.push_back(static_cast<double>(d.report.total_cost + tr.new_measurements));
            pr.nair_cost.push_back(static_cast<double>(nr.total_measurements()));
        }
        return pr;
    });

    WinLossResult out;
    out.params = params;
    for (std::size_t f = 0; f < fractions.size(); ++f) {
        WinLossCell cell;
        cell.fraction = fractions[f];
        for (const auto& pr : pairs) {
            (pr.beetle_nar[f] <= pr.nair_nar[f] ? cell.wins : cell.losses) += 1;
            cell.beetle_nar.push_back(pr.beetle_nar[f]);
            cell.nair_nar.push_back(pr.nair_nar[f]);
            cell.beetle_cost.push_back(pr.beetle_cost[f]);
            cell.nair_cost.push_back(pr.nair_cost[f]);
        }
        out.cells.push_back(std::move(cell));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comparison of the transfer methods.

struct MethodSample {
    std::string method;
    std::vector<double> nar;           // pooled over targets and repeats
    std::vector<double> measurements;  // per run, source + target
};

struct CompareResult {
    double train_fraction = 0.1;
    std::vector<MethodSample> methods;  // BEETLE, valov, gp
    stats::RankedGroups ranks;
};

struct CompareParams {
    DiscoveryParams discovery;
    double train_fraction = 0.1;  // BEETLE's training rows, as a share of the bellwether
    baselines::ValovParams valov;
    baselines::GPTransferParams gp;
    stats::ScottKnottParams sk;
};

inline CompareResult run_compare(std::span<const EnvironmentDataset> envs, const CompareParams& params,
                                 const RunOptions& opts) {
    opts.validate();
    params.discovery.validate();
    detail::require_environments(envs);
    if (!(params.train_fraction > 0.0 && params.train_fraction <= 1.0)) {
        throw Error(ErrorKind::config, "train fraction must be in (0, 1]");
    }

    struct RunResult {
        double nar[3];
        double cost[3];
    };
    const std::size_t n = envs.size();
    const auto runs = parallel_map(n * opts.repeats, opts.jobs, [&](std::size_t k) {
        const std::size_t t = k / opts.repeats, r = k % opts.repeats;
        const std::uint64_t seed = derive_seed(opts.repeat_seed(r), t);
        const auto sources = detail::all_but(envs, t);
        RunResult rr{};

        DiscoveryParams dp = params.discovery;
        dp.seed = seed;
        auto d = find_bellwether(sources, dp);
        const auto& bellwether = sources[d.bellwether];
        const auto budget = std::max(dp.min_train, detail::fraction_rows(params.train_fraction, bellwether.size()));
        const auto tr = transfer_to_target(bellwether, d.ledgers[d.bellwether], envs[t],
                                           std::min(budget, bellwether.size()), derive_seed(seed, 1), dp.tree);
        rr.nar[0] = tr.nar;
        rr.cost[0] = static_cast<double>(d.report.total_cost + tr.new_measurements);

        Rng pick(derive_seed(seed, 2));
        const auto& source = sources[std::uniform_int_distribution<std::size_t>(0, sources.size() - 1)(pick)];
        auto vp = params.valov;
        vp.seed = derive_seed(seed, 3);
        const auto vo = baselines::valov_transfer(source, envs[t], vp).outcome;
        rr.nar[1] = vo.nar;
        rr.cost[1] = static_cast<double>(vo.total_measurements());

        auto gp = params.gp;
        gp.seed = derive_seed(seed, 4);
        const auto go = baselines::gp_transfer(source, envs[t], gp).outcome;
        rr.nar[2] = go.nar;
        rr.cost[2] = static_cast<double>(go.total_measurements());
        return rr;
    });

    CompareResult out;
    out.train_fraction = params.train_fraction;
    const char* names[3] = {"BEETLE", "valov", "gp"};
    stats::Treatments treatments;
    for (std::size_t m = 0; m < 3; ++m) {
        MethodSample s{names[m], {}, {}};
        for (const auto& rr : runs) {
            s.nar.push_back(rr.nar[m]);
            s.measurements.push_back(rr.cost[m]);
        }
        treatments.emplace_back(s.method, s.nar);
        out.methods.push_back(std::move(s));
    }
    auto sk = params.sk;
    sk.bootstrap.seed = derive_seed(opts.seed, 0x5c077);
    out.ranks = stats::scott_knott(treatments, sk);
    return out;
}

// ---------------------------------------------------------------------------
// Budget/lives sweep.

struct SweepCell {
    double budget = 0.0;
    std::size_t lives = 0;
    double median_nar = 0.0;
    double median_cost_fraction = 0.0;
    std::vector<double> nar;
};

struct SweepResult {
    DiscoveryParams params;
    std::vector<SweepCell> cells;  // budgets outer, lives inner
};

inline SweepResult run_sweep(std::span<const EnvironmentDataset> envs, const std::vector<double>& budgets,
                             const std::vector<std::size_t>& lives, const DiscoveryParams& params,
                             const RunOptions& opts) {
    opts.validate();
    detail::require_environments(envs);
    if (budgets.empty() || lives.empty()) throw Error(ErrorKind::config, "sweep grid is empty");
    for (auto l : lives) {
        if (l < 1) throw Error(ErrorKind::config, "lives must be at least 1 in every sweep cell");
    }
    for (auto b : budgets) {
        if (!(b > 0.0 && b <= 1.0)) throw Error(ErrorKind::config, "sweep budgets must be in (0, 1]");
    }

    SweepResult out;
    out.params = params;
    const std::size_t n = envs.size();
    std::size_t total_rows = 0;
    for (const auto& e : envs) total_rows += e.size();
    for (double b : budgets) {
        for (auto l : lives) {
            DiscoveryParams p = params;
            p.budget = b;
            p.lives = l;
            p.validate();
            struct Run {
                double nar, cost;
            };
            const auto runs = parallel_map(n * opts.repeats, opts.jobs, [&](std::size_t k) {
                const std::size_t t = k / opts.repeats, r = k % opts.repeats;
                const auto sources = detail::all_but(envs, t);
                DiscoveryParams q = p;
                q.seed = derive_seed(opts.repeat_seed(r), t);
                auto d = find_bellwether(sources, q);
                auto& ledger = d.ledgers[d.bellwether];
                const auto budget = std::min(sources[d.bellwether].size(),
                                             std::max(q.min_train, ledger.revealed_count()));
                const auto tr = transfer_to_target(sources[d.bellwether], ledger, envs[t], budget,
                                                   derive_seed(q.seed, 1), q.tree);
                return Run{tr.nar, static_cast<double>(d.report.total_cost + tr.new_measurements) /
                                       static_cast<double>(total_rows - envs[t].size())};
            });
            SweepCell cell;
            cell.budget = b;
            cell.lives = l;
            std::vector<double> costs;
            for (const auto& run : runs) {
                cell.nar.push_back(run.nar);
                costs.push_back(run.cost);
            }
            cell.median_nar = stats::median(cell.nar);
            cell.median_cost_fraction = stats::median(costs);
            out.cells.push_back(std::move(cell));
        }
    }
    return out;
}

}  // namespace beetle::harness
