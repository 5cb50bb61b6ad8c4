#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beetle/core/csv.hpp"

namespace beetle {

struct ManifestEntry {
    std::string env_id;
    std::filesystem::path csv;
};

/// A system's environments. On disk:
///
///   {
///     "system": "x264",
///     "objective": "perf",
///     "sense": "min",
///     "environments": { "env_a": "env_a.csv", "env_b": "data/env_b.csv" },
///     "metadata": { ... }          // optional, free-form (e.g. |C|, |H|, |W|, |V|)
///   }
///
/// Relative CSV paths resolve against the manifest's directory. Environments
/// are kept in env_id order.
struct Manifest {
    std::string system;
    std::string objective = "perf";
    Sense sense = Sense::minimize;
    std::vector<ManifestEntry> environments;
    nlohmann::json metadata = nlohmann::json::object();
};

inline Manifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    Manifest m;
    try {
        m.system = j.value("system", std::string{});
        m.objective = j.value("objective", std::string{"perf"});
        m.sense = parse_sense(j.value("sense", std::string{"min"}));
        if (j.contains("metadata")) m.metadata = j.at("metadata");
        const auto& envs = j.at("environments");
        if (!envs.is_object()) throw Error(ErrorKind::schema, "manifest 'environments' must be an object");
        for (const auto& [id, path] : envs.items()) {
            std::filesystem::path p = path.get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            m.environments.push_back({id, p});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::schema, std::string("malformed manifest: ") + e.what());
    }
    return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open manifest '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::schema, "manifest '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_manifest(j, path.parent_path());
}

inline nlohmann::json to_json(const Manifest& m, const std::filesystem::path& base_dir = {}) {
    nlohmann::json envs = nlohmann::json::object();
    for (const auto& e : m.environments) {
        auto p = base_dir.empty() ? e.csv : std::filesystem::relative(e.csv, base_dir);
        envs[e.env_id] = p.generic_string();
    }
    return {{"system", m.system},
            {"objective", m.objective},
            {"sense", to_string(m.sense)},
            {"environments", envs},
            {"metadata", m.metadata}};
}

/// Loads every environment of a manifest over one shared configuration space
/// (per-option domains are the union across environments).
inline std::vector<EnvironmentDataset> load_system(const Manifest& m,
                                                   std::optional<std::string> objective = std::nullopt,
                                                   std::optional<Sense> sense = std::nullopt) {
    const std::string obj = objective.value_or(m.objective);
    const Sense sn = sense.value_or(m.sense);
    if (m.environments.empty()) throw Error(ErrorKind::insufficient_data, "manifest lists no environments");

    std::vector<EnvironmentTable> tables;
    tables.reserve(m.environments.size());
    std::optional<ConfigurationSpace> space;
    for (const auto& e : m.environments) {
        tables.push_back(read_environment_table(e.csv, obj));
        auto sp = ConfigurationSpace::infer(tables.back().option_names, tables.back().configurations);
        if (space && !space->same_options(sp)) {
            throw Error(ErrorKind::schema, "environment '" + e.env_id + "' has different options");
        }
        space = space ? space->merged(sp) : sp;
    }
    std::vector<EnvironmentDataset> out;
    out.reserve(tables.size());
    for (std::size_t i = 0; i < tables.size(); ++i) {
        out.push_back(make_dataset(std::move(tables[i]), m.environments[i].env_id, m.system, obj, sn, &*space));
    }
    return out;
}

inline std::vector<EnvironmentDataset> load_system(const std::filesystem::path& manifest_path) {
    return load_system(load_manifest(manifest_path));
}

}  // namespace beetle
