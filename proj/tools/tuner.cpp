// tuner: command-line front end for bellwether discovery, transfer and the
// experiment workflows. Exit codes: 0 ok, 2 configuration error, 3 data error.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beetle/beetle.hpp"

namespace {

using namespace beetle;
using harness::json;

struct Globals {
    std::string manifest;
    std::string objective;
    std::string sense;
    std::size_t repeats = 30;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::size_t jobs = 0;
    std::string repeat_mode = "resample";
    bool chart = false;

    harness::RunOptions run_options() const {
        harness::RunOptions o;
        o.repeats = repeats;
        o.seed = seed;
        o.mode = harness::parse_repeat_mode(repeat_mode);
        o.jobs = jobs == 0 ? harness::default_jobs() : jobs;
        o.validate();
        return o;
    }

    std::vector<EnvironmentDataset> load() const {
        if (manifest.empty()) throw Error(ErrorKind::config, "--manifest is required");
        const auto m = load_manifest(manifest);
        std::optional<std::string> obj;
        std::optional<Sense> sn;
        if (!objective.empty()) obj = objective;
        if (!sense.empty()) sn = parse_sense(sense);
        return load_system(m, obj, sn);
    }

    json describe() const {
        return {{"manifest", manifest}, {"objective", objective}, {"sense", sense}};
    }
};

struct DiscoveryFlags {
    double step_size = 0.01;
    double budget = 0.10;
    std::size_t lives = 5;
    std::size_t min_train = 5;
    std::string aggregate = "median";
    std::size_t min_leaf = 1;

    void add(CLI::App* app) {
        app->add_option("--step-size", step_size, "Fraction of each environment revealed per round")
            ->capture_default_str();
        app->add_option("--budget", budget, "Measurement cap as a fraction of all rows")->capture_default_str();
        app->add_option("--lives", lives, "Rounds without eliminations before stopping")->capture_default_str();
        app->add_option("--min-train", min_train, "Rows every survivor needs before scoring")->capture_default_str();
        app->add_option("--aggregate", aggregate, "Score aggregate over targets: median|mean")->capture_default_str();
        app->add_option("--min-leaf", min_leaf, "Minimum rows per tree leaf")->capture_default_str();
    }

    DiscoveryParams params(std::uint64_t seed) const {
        DiscoveryParams p;
        p.step_size = step_size;
        p.budget = budget;
        p.lives = lives;
        p.min_train = min_train;
        p.aggregate = parse_aggregate(aggregate);
        p.tree.min_samples_leaf = min_leaf;
        p.seed = seed;
        p.validate();
        return p;
    }
};

std::size_t find_env(const std::vector<EnvironmentDataset>& envs, const std::string& id) {
    for (std::size_t i = 0; i < envs.size(); ++i) {
        if (envs[i].env_id() == id) return i;
    }
    throw Error(ErrorKind::config, "no environment '" + id + "' in the manifest");
}

std::optional<std::string> maybe(bool on, const std::string& svg) {
    return on ? std::optional<std::string>(svg) : std::nullopt;
}

// --- subcommands -----------------------------------------------------------

void cmd_discover(const Globals& g, const DiscoveryFlags& f) {
    const auto envs = g.load();
    const auto p = f.params(g.seed);
    const auto d = find_bellwether(envs, p);
    harness::Table t{{"round", "cost", "revealed_fraction", "env_id", "score", "eliminated", "lives_remaining"}, {}};
    std::map<std::string, harness::Series> series;
    for (const auto& r : d.report.rounds) {
        for (const auto& s : r.scores) {
            const bool out = std::find(r.eliminated.begin(), r.eliminated.end(), s.env_id) != r.eliminated.end();
            t.rows.push_back({harness::cell(r.index), harness::cell(r.cost), harness::cell(r.revealed_fraction),
                              s.env_id, harness::cell(s.score), out ? "yes" : "no",
                              harness::cell(r.lives_remaining)});
            auto& sr = series[s.env_id];
            sr.name = s.env_id;
            sr.xs.push_back(r.revealed_fraction * 100.0);
            sr.ys.push_back(s.score);
        }
    }
    std::vector<harness::Series> lines;
    for (auto& [id, s] : series) lines.push_back(std::move(s));
    const auto results = harness::envelope("discover", g.run_options(),
                                           {{"input", g.describe()}, {"discovery", harness::to_json(p)}},
                                           harness::to_json(d.report));
    harness::write_outputs(g.out, results, t,
                           maybe(g.chart, harness::svg_line_chart("Discovery scores", "% rows revealed",
                                                                  "score (median NAR)", lines)));
    std::cout << "bellwether: " << d.report.bellwether_id << " (cost " << d.report.total_cost << " of "
              << d.report.total_rows << " rows)\n";
}

void cmd_beetle(const Globals& g, const DiscoveryFlags& f, const std::string& target, double train_fraction) {
    const auto envs = g.load();
    const auto t = find_env(envs, target);
    std::vector<EnvironmentDataset> sources;
    for (std::size_t i = 0; i < envs.size(); ++i) {
        if (i != t) sources.push_back(envs[i]);
    }
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw Error(ErrorKind::config, "--train-fraction must be in (0, 1]");
    }
    const auto p = f.params(g.seed);
    std::size_t largest = 0;
    for (const auto& s : sources) largest = std::max(largest, s.size());
    const auto budget = std::max(p.min_train, static_cast<std::size_t>(std::llround(train_fraction * largest)));
    const auto r = beetle_optimize(sources, envs[t], p, budget);
    json result = {{"discovery", harness::to_json(r.discovery.report)},
                   {"transfer",
                    {{"target", target},
                     {"configuration", r.transfer.configuration.values},
                     {"target_row", r.transfer.target_row},
                     {"nar", r.transfer.nar},
                     {"train_rows", r.transfer.train_rows},
                     {"new_measurements", r.transfer.new_measurements}}},
                   {"total_measurements", r.total_measurements()}};
    harness::Table table{{"target", "bellwether", "nar", "train_rows", "total_measurements"},
                         {{target, r.discovery.report.bellwether_id, harness::cell(r.transfer.nar),
                           harness::cell(r.transfer.train_rows), harness::cell(r.total_measurements())}}};
    const auto results =
        harness::envelope("beetle", g.run_options(),
                          {{"input", g.describe()}, {"discovery", harness::to_json(p)}, {"train_fraction", train_fraction}},
                          result);
    harness::write_outputs(g.out, results, table,
                           maybe(g.chart, harness::svg_bar_chart("Measurements", "rows", {"discovery", "transfer"},
                                                                 {double(r.discovery.report.total_cost),
                                                                  double(r.transfer.new_measurements)})));
    std::cout << "bellwether " << r.discovery.report.bellwether_id << ", NAR on " << target << ": " << r.transfer.nar
              << "\n";
}

struct BaselineFlags {
    std::string method;
    std::string target;
    std::string source;
    int training_coefficient = 3;
    std::size_t transfer_samples = 10;
    std::size_t source_budget = 20;
    std::size_t target_budget = 10;
    bool train_on_target = false;
    std::size_t samples = 0;
    std::size_t min_leaf = 1;
};

void cmd_baseline(const Globals& g, const BaselineFlags& f) {
    const auto envs = g.load();
    const auto& target = envs[find_env(envs, f.target)];
    learners::TreeParams tree;
    tree.min_samples_leaf = f.min_leaf;
    json params = {{"input", g.describe()}, {"method", f.method}, {"target", f.target}};
    json result;
    baselines::Outcome outcome;
    if (f.method == "valov" || f.method == "gp") {
        if (f.source.empty()) throw Error(ErrorKind::config, "--source is required for " + f.method);
        const auto& source = envs[find_env(envs, f.source)];
        params["source"] = f.source;
        if (f.method == "valov") {
            baselines::ValovParams vp;
            vp.training_coefficient = f.training_coefficient;
            vp.transfer_sample_count = f.transfer_samples;
            vp.seed = g.seed;
            vp.tree = tree;
            params["training_coefficient"] = f.training_coefficient;
            params["transfer_samples"] = f.transfer_samples;
            const auto v = baselines::valov_transfer(source, target, vp);
            outcome = v.outcome;
            result = {{"outcome", harness::to_json(outcome)},
                      {"map", {{"slope", v.map.slope}, {"intercept", v.map.intercept}}}};
        } else {
            baselines::GPTransferParams gp;
            gp.source_budget = f.source_budget;
            gp.target_budget = f.target_budget;
            gp.train_on_target = f.train_on_target;
            gp.seed = g.seed;
            params["source_budget"] = f.source_budget;
            params["target_budget"] = f.target_budget;
            params["train_on_target"] = f.train_on_target;
            const auto o = baselines::gp_transfer(source, target, gp);
            outcome = o.outcome;
            result = {{"outcome", harness::to_json(outcome)},
                      {"correlation", o.correlation},
                      {"correlation_fallback", o.correlation_fallback}};
        }
    } else if (f.method == "nair") {
        const auto n = f.samples ? f.samples : std::max<std::size_t>(2, (target.size() + 9) / 10);
        params["samples"] = n;
        outcome = baselines::nair_optimize(target, n, g.seed, tree);
        result = {{"outcome", harness::to_json(outcome)}};
    } else {
        throw Error(ErrorKind::config, "unknown method '" + f.method + "' (expected valov, gp or nair)");
    }
    harness::Table table{{"method", "target", "nar", "source_measurements", "target_measurements"},
                         {{f.method, f.target, harness::cell(outcome.nar), harness::cell(outcome.source_measurements),
                           harness::cell(outcome.target_measurements)}}};
    harness::write_outputs(g.out, harness::envelope("baseline", g.run_options(), params, result), table,
                           maybe(g.chart, harness::svg_bar_chart("Measurements", "rows", {"source", "target"},
                                                                 {double(outcome.source_measurements),
                                                                  double(outcome.target_measurements)})));
    std::cout << f.method << " NAR on " << f.target << ": " << outcome.nar << "\n";
}

std::vector<std::string> treatment_ids(const stats::RankedGroups& g) {
    std::vector<std::string> ids;
    for (const auto& grp : g.groups) {
        for (const auto& t : grp.treatments) ids.push_back(t.id);
    }
    return ids;
}

std::vector<double> treatment_medians(const stats::RankedGroups& g) {
    std::vector<double> v;
    for (const auto& grp : g.groups) {
        for (const auto& t : grp.treatments) v.push_back(t.quartiles.p50);
    }
    return v;
}

void cmd_rq1(const Globals& g, double train_fraction, std::size_t min_leaf) {
    const auto envs = g.load();
    const auto opts = g.run_options();
    learners::TreeParams tree;
    tree.min_samples_leaf = min_leaf;
    const auto r = harness::run_roundrobin(envs, opts, train_fraction, tree);
    const json params = {{"input", g.describe()}, {"train_fraction", train_fraction}, {"tree", harness::to_json(tree)}};
    harness::write_outputs(g.out, harness::envelope("rq1", opts, params, harness::to_json(r)),
                           harness::ranks_table(r.ranks),
                           maybe(g.chart, harness::svg_bar_chart("Round robin", "median NAR", treatment_ids(r.ranks),
                                                                 treatment_medians(r.ranks))));
    harness::ranks_table(r.ranks).write(std::cout);
}

void cmd_rq2(const Globals& g, const DiscoveryFlags& f) {
    const auto envs = g.load();
    const auto opts = g.run_options();
    const auto p = f.params(g.seed);
    const auto r = harness::run_discovery(envs, p, opts);
    std::map<std::string, double> picks;
    for (const auto& run : r.runs) picks[run.report.bellwether_id] += 1.0;
    std::vector<std::string> labels;
    std::vector<double> counts;
    for (const auto& [id, c] : picks) {
        labels.push_back(id);
        counts.push_back(c);
    }
    const json params = {{"input", g.describe()}, {"discovery", harness::to_json(p)}};
    harness::write_outputs(g.out, harness::envelope("rq2", opts, params, harness::to_json(r)),
                           harness::discovery_table(r),
                           maybe(g.chart, harness::svg_bar_chart("Predicted bellwethers", "runs", labels, counts)));
    harness::discovery_table(r).write(std::cout);
}

void cmd_rq3(const Globals& g, const DiscoveryFlags& f, const std::vector<double>& fractions) {
    const auto envs = g.load();
    const auto opts = g.run_options();
    const auto p = f.params(g.seed);
    const auto r = harness::run_winloss(envs, p, opts, fractions);
    harness::Series b{"BEETLE", {}, {}}, n{"non-transfer", {}, {}};
    for (const auto& c : r.cells) {
        b.xs.push_back(c.fraction * 100.0);
        b.ys.push_back(stats::median(c.beetle_nar));
        n.xs.push_back(c.fraction * 100.0);
        n.ys.push_back(stats::median(c.nair_nar));
    }
    const json params = {{"input", g.describe()}, {"discovery", harness::to_json(p)}, {"fractions", fractions}};
    harness::write_outputs(
        g.out, harness::envelope("rq3", opts, params, harness::to_json(r)), harness::winloss_table(r),
        maybe(g.chart, harness::svg_line_chart("NAR vs sampling", "% rows sampled", "median NAR", {b, n})));
    harness::winloss_table(r).write(std::cout);
}

struct CompareFlags {
    double train_fraction = 0.1;
    int training_coefficient = 3;
    std::size_t transfer_samples = 10;
    std::size_t source_budget = 20;
    std::size_t target_budget = 10;
    bool train_on_target = false;
};

void cmd_rq4(const Globals& g, const DiscoveryFlags& f, const CompareFlags& c) {
    const auto envs = g.load();
    const auto opts = g.run_options();
    harness::CompareParams p;
    p.discovery = f.params(g.seed);
    p.train_fraction = c.train_fraction;
    p.valov.training_coefficient = c.training_coefficient;
    p.valov.transfer_sample_count = c.transfer_samples;
    p.valov.tree = p.discovery.tree;
    p.gp.source_budget = c.source_budget;
    p.gp.target_budget = c.target_budget;
    p.gp.train_on_target = c.train_on_target;
    const auto r = harness::run_compare(envs, p, opts);
    std::vector<std::string> labels;
    std::vector<double> totals;
    for (const auto& m : r.methods) {
        labels.push_back(m.method);
        totals.push_back(stats::median(m.measurements));
    }
    const json params = {{"input", g.describe()},
                         {"discovery", harness::to_json(p.discovery)},
                         {"train_fraction", c.train_fraction},
                         {"training_coefficient", c.training_coefficient},
                         {"transfer_samples", c.transfer_samples},
                         {"source_budget", c.source_budget},
                         {"target_budget", c.target_budget},
                         {"train_on_target", c.train_on_target}};
    harness::write_outputs(g.out, harness::envelope("rq4", opts, params, harness::to_json(r)),
                           harness::compare_table(r),
                           maybe(g.chart, harness::svg_bar_chart("Measurements per run", "median rows", labels, totals)));
    harness::compare_table(r).write(std::cout);
}

void cmd_sweep(const Globals& g, const DiscoveryFlags& f, const std::vector<double>& budgets,
               const std::vector<std::size_t>& lives) {
    const auto envs = g.load();
    const auto opts = g.run_options();
    const auto p = f.params(g.seed);
    const auto r = harness::run_sweep(envs, budgets, lives, p, opts);
    std::vector<harness::Series> lines;
    for (auto l : lives) {
        harness::Series s{"lives " + std::to_string(l), {}, {}};
        for (const auto& c : r.cells) {
            if (c.lives != l) continue;
            s.xs.push_back(c.budget * 100.0);
            s.ys.push_back(c.median_nar);
        }
        lines.push_back(std::move(s));
    }
    const json params = {
        {"input", g.describe()}, {"discovery", harness::to_json(p)}, {"budgets", budgets}, {"lives", lives}};
    harness::write_outputs(
        g.out, harness::envelope("sweep", opts, params, harness::to_json(r)), harness::sweep_table(r),
        maybe(g.chart, harness::svg_line_chart("Budget and lives", "budget (% rows)", "median NAR", lines)));
    harness::sweep_table(r).write(std::cout);
}

void cmd_synth(const Globals& g, harness::SyntheticFamilySpec spec) {
    spec.seed = g.seed;
    const auto family = harness::generate_synthetic(spec);
    harness::write_synthetic(family, spec, g.out);
    const auto scores = harness::exhaustive_scores(family.environments);
    harness::Table t{{"env_id", "distortion", "full_data_score"}, {}};
    json envs = json::array();
    for (std::size_t e = 0; e < family.environments.size(); ++e) {
        t.rows.push_back({family.environments[e].env_id(), harness::cell(family.distortions[e]),
                          harness::cell(scores[e].score)});
        envs.push_back({{"env_id", family.environments[e].env_id()},
                        {"distortion", family.distortions[e]},
                        {"full_data_score", scores[e].score}});
    }
    const json params = {{"environments", spec.environments}, {"options", spec.options},
                         {"rows", spec.rows},                 {"planted", spec.planted},
                         {"active_options", spec.active_options}, {"min_distortion", spec.min_distortion},
                         {"max_distortion", spec.max_distortion}, {"noise", spec.noise},
                         {"system", spec.system}};
    std::vector<std::string> labels;
    std::vector<double> values;
    for (const auto& e : envs) {
        labels.push_back(e["env_id"]);
        values.push_back(e["distortion"]);
    }
    harness::write_outputs(g.out,
                           harness::envelope("synth", g.run_options(), params,
                                             {{"planted_bellwether", family.planted_id}, {"environments", envs}}),
                           t, maybe(g.chart, harness::svg_bar_chart("Distortion", "d", labels, values)));
    std::cout << "wrote " << family.environments.size() << " environments to " << g.out << " (planted "
              << family.planted_id << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bellwether-based transfer learning for configuration tuning"};
    app.set_version_flag("--version", std::string(BEETLE_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--manifest", g.manifest, "System manifest (JSON)");
    app.add_option("--objective", g.objective, "Objective column (default: the manifest's)");
    app.add_option("--sense", g.sense, "min or max (default: the manifest's)");
    app.add_option("--repeats", g.repeats, "Repeated runs per workflow")->capture_default_str();
    app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads (0: all cores)")->capture_default_str();
    app.add_option("--repeat-mode", g.repeat_mode, "resample|reseed")->capture_default_str();
    app.add_flag("--chart", g.chart, "Also write chart.svg");

    DiscoveryFlags df;
    auto* discover = app.add_subcommand("discover", "Find the bellwether environment");
    df.add(discover);

    auto* beetle_cmd = app.add_subcommand("beetle", "Find the bellwether and transfer to a target");
    std::string target;
    double train_fraction = 0.1;
    df.add(beetle_cmd);
    beetle_cmd->add_option("--target", target, "Target environment id")->required();
    beetle_cmd->add_option("--train-fraction", train_fraction, "Bellwether rows used for training")
        ->capture_default_str();

    BaselineFlags bf;
    auto* baseline = app.add_subcommand("baseline", "Run a baseline optimizer");
    baseline->add_option("--method", bf.method, "valov|gp|nair")->required();
    baseline->add_option("--target", bf.target, "Target environment id")->required();
    baseline->add_option("--source", bf.source, "Source environment id (valov, gp)");
    baseline->add_option("--training-coefficient", bf.training_coefficient, "valov: T in T * options")
        ->capture_default_str();
    baseline->add_option("--transfer-samples", bf.transfer_samples, "valov: paired rows for the linear map")
        ->capture_default_str();
    baseline->add_option("--source-budget", bf.source_budget, "gp: source rows")->capture_default_str();
    baseline->add_option("--target-budget", bf.target_budget, "gp: target rows")->capture_default_str();
    baseline->add_flag("--train-on-target", bf.train_on_target, "gp: also fit on target rows");
    baseline->add_option("--samples", bf.samples, "nair: target rows (0: 10%)")->capture_default_str();
    baseline->add_option("--min-leaf", bf.min_leaf, "Minimum rows per tree leaf")->capture_default_str();

    auto* rq1 = app.add_subcommand("rq1", "Round robin over all sources");
    double rq1_fraction = 1.0;
    std::size_t rq1_leaf = 1;
    rq1->add_option("--train-fraction", rq1_fraction, "Source rows used for training")->capture_default_str();
    rq1->add_option("--min-leaf", rq1_leaf, "Minimum rows per tree leaf")->capture_default_str();

    auto* rq2 = app.add_subcommand("rq2", "Incremental discovery against the 100%-data bellwether");
    df.add(rq2);

    auto* rq3 = app.add_subcommand("rq3", "Win/loss against the non-transfer optimizer");
    df.add(rq3);
    std::vector<double> fractions = harness::default_fractions();
    rq3->add_option("--fractions", fractions, "Sampling fractions")->delimiter(',')->capture_default_str();

    auto* rq4 = app.add_subcommand("rq4", "Compare BEETLE, valov and gp");
    df.add(rq4);
    CompareFlags cf;
    rq4->add_option("--train-fraction", cf.train_fraction, "BEETLE training rows")->capture_default_str();
    rq4->add_option("--training-coefficient", cf.training_coefficient, "valov: T")->capture_default_str();
    rq4->add_option("--transfer-samples", cf.transfer_samples, "valov: paired rows")->capture_default_str();
    rq4->add_option("--source-budget", cf.source_budget, "gp: source rows")->capture_default_str();
    rq4->add_option("--target-budget", cf.target_budget, "gp: target rows")->capture_default_str();
    rq4->add_flag("--train-on-target", cf.train_on_target, "gp: also fit on target rows");

    auto* sweep = app.add_subcommand("sweep", "Budget and lives grid");
    df.add(sweep);
    std::vector<double> budgets{0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
    std::vector<std::size_t> lives{1, 3, 5, 10};
    sweep->add_option("--budgets", budgets, "Budgets (fractions)")->delimiter(',')->capture_default_str();
    sweep->add_option("--lives-grid", lives, "Lives values")->delimiter(',')->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Write a synthetic family with a planted bellwether");
    harness::SyntheticFamilySpec spec;
    synth->add_option("--environments", spec.environments)->capture_default_str();
    synth->add_option("--options", spec.options)->capture_default_str();
    synth->add_option("--rows", spec.rows)->capture_default_str();
    synth->add_option("--planted", spec.planted, "Index of the planted bellwether")->capture_default_str();
    synth->add_option("--active-options", spec.active_options)->capture_default_str();
    synth->add_option("--min-distortion", spec.min_distortion)->capture_default_str();
    synth->add_option("--max-distortion", spec.max_distortion)->capture_default_str();
    synth->add_option("--noise", spec.noise)->capture_default_str();
    synth->add_option("--system", spec.system)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (discover->parsed()) cmd_discover(g, df);
        else if (beetle_cmd->parsed()) cmd_beetle(g, df, target, train_fraction);
        else if (baseline->parsed()) cmd_baseline(g, bf);
        else if (rq1->parsed()) cmd_rq1(g, rq1_fraction, rq1_leaf);
        else if (rq2->parsed()) cmd_rq2(g, df);
        else if (rq3->parsed()) cmd_rq3(g, df, fractions);
        else if (rq4->parsed()) cmd_rq4(g, df, cf);
        else if (sweep->parsed()) cmd_sweep(g, df, budgets, lives);
        else if (synth->parsed()) cmd_synth(g, spec);
    } catch (const beetle::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_configuration() ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
