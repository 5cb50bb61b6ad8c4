#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beetle/core/csv.hpp"
#include "beetle/harness/workflows.hpp"

#ifndef BEETLE_VERSION
#define BEETLE_VERSION "0.0.0"
#endif

namespace beetle::harness {

using nlohmann::json;

inline json quartiles_json(const std::vector<double>& v) {
    const auto q = stats::quartiles(v);
    return {{"p25", q.p25}, {"p50", q.p50}, {"p75", q.p75}, {"iqr", q.iqr()}};
}

/// Plain-text quartile glyph: dashes span p25..p75, '*' marks the median,
/// '|' the middle of the [lo, hi] scale.
inline std::string quartile_bar(const stats::Quartiles& q, double lo, double hi, std::size_t width = 30) {
    std::string bar(width, ' ');
    if (width == 0) return bar;
    const double span = hi > lo ? hi - lo : 1.0;
    auto pos = [&](double v) {
        const double t = std::clamp((v - lo) / span, 0.0, 1.0);
        return static_cast<std::size_t>(std::lround(t * static_cast<double>(width - 1)));
    };
    bar[width / 2] = '|';
    for (std::size_t i = pos(q.p25); i <= pos(q.p75); ++i) bar[i] = '-';
    bar[pos(q.p50)] = '*';
    return bar;
}

inline json to_json(const learners::TreeParams& p) {
    return {{"min_samples_leaf", p.min_samples_leaf}, {"max_depth", p.max_depth}};
}

inline json to_json(const DiscoveryParams& p) {
    return {{"step_size", p.step_size},   {"budget", p.budget},
            {"lives", p.lives},           {"seed", p.seed},
            {"min_train", p.min_train},   {"aggregate", p.aggregate == Aggregate::median ? "median" : "mean"},
            {"tree", to_json(p.tree)}};
}

inline json to_json(const BellwetherReport& r) {
    json rounds = json::array();
    for (const auto& round : r.rounds) {
        json scores = json::object();
        for (const auto& s : round.scores) scores[s.env_id] = s.score;
        json jr = {{"index", round.index},
                   {"cost", round.cost},
                   {"revealed_fraction", round.revealed_fraction},
                   {"scored", round.scored},
                   {"scores", scores},
                   {"eliminated", round.eliminated},
                   {"lives_remaining", round.lives_remaining}};
        if (round.scored) jr["threshold"] = round.threshold;
        rounds.push_back(std::move(jr));
    }
    json costs = json::object();
    for (const auto& [id, c] : r.env_costs) costs[id] = c;
    return {{"bellwether_id", r.bellwether_id},
            {"scored", r.scored},
            {"survivors", r.survivors},
            {"total_cost", r.total_cost},
            {"total_rows", r.total_rows},
            {"budget_rows", r.budget_rows},
            {"env_costs", costs},
            {"rounds", rounds}};
}

inline json to_json(const stats::RankedGroups& g) {
    json groups = json::array();
    for (const auto& group : g.groups) {
        json ts = json::array();
        for (const auto& t : group.treatments) {
            ts.push_back({{"id", t.id},
                          {"samples", t.samples},
                          {"p25", t.quartiles.p25},
                          {"median", t.quartiles.p50},
                          {"p75", t.quartiles.p75},
                          {"iqr", t.quartiles.iqr()}});
        }
        groups.push_back({{"rank", group.rank}, {"treatments", ts}});
    }
    return groups;
}

inline json to_json(const baselines::Outcome& o) {
    return {{"configuration", o.configuration.values},
            {"target_row", o.target_row},
            {"nar", o.nar},
            {"source_measurements", o.source_measurements},
            {"target_measurements", o.target_measurements}};
}

/// A CSV table of already formatted cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& out) const {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out << ',';
                const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
                if (!quote) {
                    out << cells[i];
                    continue;
                }
                out << '"';
                for (char c : cells[i]) out << (c == '"' ? "\"\"" : std::string(1, c));
                out << '"';
            }
            out << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
    }
};

inline std::string cell(double v) { return beetle::detail::format_double(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(const std::string& v) { return v; }

inline Table ranks_table(const stats::RankedGroups& g) {
    Table t{{"rank", "id", "median", "iqr", "p25", "p75", "bar"}, {}};
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& group : g.groups) {
        for (const auto& tr : group.treatments) {
            lo = first ? tr.quartiles.p25 : std::min(lo, tr.quartiles.p25);
            hi = first ? tr.quartiles.p75 : std::max(hi, tr.quartiles.p75);
            first = false;
        }
    }
    for (const auto& group : g.groups) {
        for (const auto& tr : group.treatments) {
            t.rows.push_back({cell(group.rank), tr.id, cell(tr.quartiles.p50), cell(tr.quartiles.iqr()),
                              cell(tr.quartiles.p25), cell(tr.quartiles.p75), quartile_bar(tr.quartiles, lo, hi)});
        }
    }
    return t;
}

/// Standard results.json wrapper: tool, version, command, run options and parameters.
inline json envelope(const std::string& command, const RunOptions& opts, json params, json result) {
    return {{"tool", "tuner"},
            {"version", BEETLE_VERSION},
            {"command", command},
            {"seed", opts.seed},
            {"repeats", opts.repeats},
            {"repeat_mode", to_string(opts.mode)},
            {"params", std::move(params)},
            {"result", std::move(result)}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::config, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error(ErrorKind::config, "failed writing '" + path.string() + "'");
}

/// Writes results.json, table.csv and (when given) chart.svg into `dir`.
inline void write_outputs(const std::filesystem::path& dir, const json& results, const Table& table,
                          const std::optional<std::string>& svg = std::nullopt) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::config, "cannot create output directory '" + dir.string() + "'");
    write_text(dir / "results.json", results.dump(2) + "\n");
    std::ostringstream csv;
    table.write(csv);
    write_text(dir / "table.csv", csv.str());
    if (svg) write_text(dir / "chart.svg", *svg);
}

// ---------------------------------------------------------------------------
// Workflow results.

inline json to_json(const RoundRobinResult& r) {
    json sources = json::array();
    for (const auto& s : r.sources) {
        sources.push_back({{"env_id", s.env_id}, {"values", s.values}, {"quartiles", quartiles_json(s.values)}});
    }
    return {{"train_fraction", r.train_fraction}, {"sources", sources}, {"ranks", to_json(r.ranks)}};
}

inline json to_json(const DiscoveryResult& r) {
    json scores = json::object();
    for (const auto& s : r.reference_scores) scores[s.env_id] = s.score;
    json runs = json::array();
    for (const auto& run : r.runs) {
        runs.push_back({{"seed", run.seed},
                        {"bellwether_id", run.report.bellwether_id},
                        {"nar", run.nar},
                        {"cost_fraction", run.cost_fraction},
                        {"report", to_json(run.report)}});
    }
    return {{"reference", {{"bellwether_id", r.reference_id}, {"nar", r.reference_nar}, {"scores", scores}}},
            {"predicted", {{"nar", quartiles_json(r.nars())}, {"cost_fraction", quartiles_json(r.cost_fractions())}}},
            {"matches", r.matches},
            {"runs", runs}};
}

inline Table discovery_table(const DiscoveryResult& r) {
    Table t{{"source", "median_nar", "iqr_nar", "median_cost_fraction", "matches"}, {}};
    t.rows.push_back({"100%-data:" + r.reference_id, cell(r.reference_nar), cell(0.0), cell(1.0), ""});
    const auto nq = stats::quartiles(r.nars());
    const auto cq = stats::quartiles(r.cost_fractions());
    t.rows.push_back({"predicted", cell(nq.p50), cell(nq.iqr()), cell(cq.p50),
                      cell(r.matches) + "/" + cell(r.runs.size())});
    return t;
}

inline json to_json(const WinLossResult& r) {
    json cells = json::array();
    for (const auto& c : r.cells) {
        cells.push_back({{"fraction", c.fraction},
                         {"wins", c.wins},
                         {"losses", c.losses},
                         {"win_share", c.win_share()},
                         {"beetle", {{"nar", quartiles_json(c.beetle_nar)}, {"cost", quartiles_json(c.beetle_cost)}}},
                         {"nair", {{"nar", quartiles_json(c.nair_nar)}, {"cost", quartiles_json(c.nair_cost)}}}});
    }
    return {{"cells", cells}};
}

inline Table winloss_table(const WinLossResult& r) {
    Table t{{"fraction", "wins", "losses", "win_share", "beetle_median_nar", "nair_median_nar",
             "beetle_median_cost", "nair_median_cost"},
            {}};
    for (const auto& c : r.cells) {
        t.rows.push_back({cell(c.fraction), cell(c.wins), cell(c.losses), cell(c.win_share()),
                          cell(stats::median(c.beetle_nar)), cell(stats::median(c.nair_nar)),
                          cell(stats::median(c.beetle_cost)), cell(stats::median(c.nair_cost))});
    }
    return t;
}

inline json to_json(const CompareResult& r) {
    json methods = json::array();
    for (const auto& m : r.methods) {
        double total = 0.0;
        for (double v : m.measurements) total += v;
        methods.push_back({{"method", m.method},
                           {"nar", quartiles_json(m.nar)},
                           {"measurements", {{"total", total}, {"per_run", quartiles_json(m.measurements)}}}});
    }
    return {{"train_fraction", r.train_fraction}, {"methods", methods}, {"ranks", to_json(r.ranks)}};
}

inline Table compare_table(const CompareResult& r) {
    auto t = ranks_table(r.ranks);
    t.header.push_back("median_measurements");
    for (auto& row : t.rows) {
        for (const auto& m : r.methods) {
            if (m.method == row[1]) row.push_back(cell(stats::median(m.measurements)));
        }
    }
    return t;
}

inline json to_json(const SweepResult& r) {
    json cells = json::array();
    for (const auto& c : r.cells) {
        cells.push_back({{"budget", c.budget},
                         {"lives", c.lives},
                         {"median_nar", c.median_nar},
                         {"median_cost_fraction", c.median_cost_fraction},
                         {"nar", quartiles_json(c.nar)}});
    }
    return {{"cells", cells}};
}

inline Table sweep_table(const SweepResult& r) {
    Table t{{"budget", "lives", "median_nar", "median_cost_fraction"}, {}};
    for (const auto& c : r.cells) {
        t.rows.push_back({cell(c.budget), cell(c.lives), cell(c.median_nar), cell(c.median_cost_fraction)});
    }
    return t;
}

}  // namespace beetle::harness
