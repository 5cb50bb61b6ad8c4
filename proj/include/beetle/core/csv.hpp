#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "beetle/core/dataset.hpp"

namespace beetle {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        cells.emplace_back(trim(cell));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

inline bool parse_double(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end && !text.empty();
}

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// "$<time" and "$>throughput" mark measurement columns in the public datasets.
inline std::string_view strip_measure_marker(std::string_view name) {
    if (name.size() >= 2 && name[0] == '$' && (name[1] == '<' || name[1] == '>')) return name.substr(2);
    if (!name.empty() && name[0] == '$') return name.substr(1);
    return name;
}

}  // namespace detail

/// Raw table read from an environment CSV, before duplicate collapsing.
struct EnvironmentTable {
    std::vector<std::string> option_names;
    std::vector<Configuration> configurations;
    std::vector<double> performance;
};

/// Parses CSV text. Options are every column except the objective and any
/// '$'-prefixed measurement column. `source` names the input in errors.
inline EnvironmentTable parse_environment_csv(std::istream& in, const std::string& objective_name,
                                              const std::string& source = "<csv>") {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) {
            header = detail::split_csv_line(line);
            break;
        }
    }
    if (header.empty()) throw Error(ErrorKind::schema, source + ": missing header row");

    std::ptrdiff_t objective_col = -1;
    std::vector<std::size_t> option_cols;
    EnvironmentTable table;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& name = header[i];
        if (name == objective_name || detail::strip_measure_marker(name) == objective_name) {
            if (objective_col < 0) objective_col = static_cast<std::ptrdiff_t>(i);
            continue;
        }
        if (!name.empty() && name[0] == '$') continue;
        option_cols.push_back(i);
        table.option_names.push_back(name);
    }
    if (objective_col < 0) {
        throw Error(ErrorKind::schema, source + ": objective column '" + objective_name + "' not found");
    }
    if (option_cols.empty()) throw Error(ErrorKind::schema, source + ": no option columns");

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::parse, source + ": row " + std::to_string(line_no) + " has " +
                                              std::to_string(cells.size()) + " cells, expected " +
                                              std::to_string(header.size()));
        }
        Configuration c;
        c.values.reserve(option_cols.size());
        for (auto col : option_cols) {
            double v;
            if (!detail::parse_double(cells[col], v)) {
                throw Error(ErrorKind::parse, source + ": row " + std::to_string(line_no) +
                                                  ": non-numeric value '" + cells[col] + "' in column '" +
                                                  header[col] + "'");
            }
            c.values.push_back(v);
        }
        double perf;
        if (!detail::parse_double(cells[static_cast<std::size_t>(objective_col)], perf) ||
            !std::isfinite(perf)) {
            throw Error(ErrorKind::parse, source + ": row " + std::to_string(line_no) +
                                              ": non-numeric objective '" +
                                              cells[static_cast<std::size_t>(objective_col)] + "'");
        }
        table.configurations.push_back(std::move(c));
        table.performance.push_back(perf);
    }
    return table;
}

inline EnvironmentTable read_environment_table(const std::filesystem::path& path,
                                               const std::string& objective_name) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::schema, "cannot open '" + path.string() + "'");
    return parse_environment_csv(in, objective_name, path.string());
}

inline EnvironmentDataset make_dataset(EnvironmentTable table, const std::string& env_id,
                                       const std::string& system, const std::string& objective_name,
                                       Sense sense, const ConfigurationSpace* space = nullptr) {
    ConfigurationSpace sp = space ? *space
                                  : ConfigurationSpace::infer(table.option_names, table.configurations);
    return EnvironmentDataset(env_id, system, objective_name, sense, std::move(sp),
                              std::move(table.configurations), std::move(table.performance));
}

/// Loads one environment; env_id defaults to the file stem.
inline EnvironmentDataset load_environment_csv(const std::filesystem::path& path,
                                               const std::string& objective_name, Sense sense,
                                               std::string env_id = {}, std::string system = {}) {
    if (env_id.empty()) env_id = path.stem().string();
    return make_dataset(read_environment_table(path, objective_name), env_id, system, objective_name,
                        sense);
}

/// Writes options then the objective column; values use shortest round-trip form.
inline void write_environment_csv(std::ostream& out, const EnvironmentDataset& ds) {
    const auto& names = ds.space().names();
    for (std::size_t i = 0; i < names.size(); ++i) out << names[i] << ',';
    out << ds.objective_name() << '\n';
    for (std::size_t row = 0; row < ds.size(); ++row) {
        for (double v : ds.configuration(row).values) out << detail::format_double(v) << ',';
        out << detail::format_double(ds.performance(row)) << '\n';
    }
}

inline void save_environment_csv(const std::filesystem::path& path, const EnvironmentDataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::config, "cannot write '" + path.string() + "'");
    write_environment_csv(out, ds);
}

}  // namespace beetle
