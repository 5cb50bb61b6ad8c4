#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "beetle/core/csv.hpp"
#include "beetle/core/manifest.hpp"
#include "beetle/core/random.hpp"

namespace beetle::harness {

/// A family of environments sharing one latent performance surface over
/// binary options. Only the first `active_options` options affect
/// performance (main effects plus pairwise interactions among them); the rest
/// are inert. Environment e reports
///
///   perf = offset + span * exp(log(warp_e(u)) + noise * d_e * N(0, 1))
///
/// where u in [0, 1] is the normalized latent value, d_e the environment's
/// distortion and warp_e(u) = u^(1 / (1 + d_e)) a monotone warp. The Gaussian
/// noise acts on the log scale, as timing noise does, so configurations with
/// u = 0 stay optimal everywhere. The planted bellwether has d = 0 (identity, no noise);
/// the others get distortions evenly spaced over [min_distortion,
/// max_distortion] in a seed-shuffled order.
struct SyntheticFamilySpec {
    std::size_t environments = 8;
    std::size_t options = 8;
    std::size_t rows = 256;
    std::size_t planted = 3;
    std::size_t active_options = 3;
    double min_distortion = 1.0;
    double max_distortion = 3.0;
    double noise = 1.0;
    double offset = 10.0;
    double span = 100.0;
    std::uint64_t seed = 0;
    std::string system = "synthetic";

    void validate() const {
        if (environments < 2) throw Error(ErrorKind::config, "a synthetic family needs at least 2 environments");
        if (options < 1 || options > 30) throw Error(ErrorKind::config, "synthetic option count must be in [1, 30]");
        if (active_options < 1 || active_options > options) {
            throw Error(ErrorKind::config, "active option count must be in [1, options]");
        }
        if (rows < 2) throw Error(ErrorKind::config, "synthetic environments need at least 2 rows");
        if (rows > (std::size_t{1} << options)) {
            throw Error(ErrorKind::config, std::to_string(rows) + " rows exceed the space of " +
                                               std::to_string(std::size_t{1} << options) + " configurations");
        }
        if (planted >= environments) throw Error(ErrorKind::config, "planted bellwether index out of range");
        if (noise < 0.0) throw Error(ErrorKind::config, "noise must be non-negative");
        if (min_distortion < 0.0 || max_distortion < min_distortion) {
            throw Error(ErrorKind::config, "distortions must satisfy 0 <= min <= max");
        }
    }
};

struct SyntheticFamily {
    std::vector<EnvironmentDataset> environments;
    std::vector<double> distortions;
    std::string planted_id;
};

inline std::string synthetic_env_id(std::size_t i, std::size_t count) {
    const auto width = std::to_string(count - 1).size();
    auto digits = std::to_string(i);
    return "env" + std::string(width - digits.size(), '0') + digits;
}

inline SyntheticFamily generate_synthetic(const SyntheticFamilySpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, 0));
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Configurations: the whole space, or a seeded subset shared by every environment.
    const std::size_t space = std::size_t{1} << spec.options;
    std::vector<std::size_t> codes(space);
    for (std::size_t i = 0; i < space; ++i) codes[i] = i;
    if (spec.rows < space) {
        for (std::size_t i = 0; i < spec.rows; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, space - 1);
            std::swap(codes[i], codes[pick(rng)]);
        }
        codes.resize(spec.rows);
        std::sort(codes.begin(), codes.end());
    }
    std::vector<Configuration> configs;
    for (auto code : codes) {
        Configuration c;
        for (std::size_t j = 0; j < spec.options; ++j) c.values.push_back(static_cast<double>((code >> j) & 1U));
        configs.push_back(std::move(c));
    }

    // Latent surface over the active options only.
    const std::size_t active = spec.active_options;
    std::vector<double> main(active);
    for (auto& w : main) w = gauss(rng);
    struct Interaction {
        std::size_t a, b;
        double w;
    };
    std::vector<Interaction> inter;
    for (std::size_t a = 0; a < active; ++a) {
        for (std::size_t b = a + 1; b < active; ++b) inter.push_back({a, b, 0.5 * gauss(rng)});
    }
    std::vector<double> latent;
    for (const auto& c : configs) {
        double v = 0.0;
        for (std::size_t j = 0; j < active; ++j) v += main[j] * c[j];
        for (const auto& in : inter) v += in.w * c[in.a] * c[in.b];
        latent.push_back(v);
    }
    const auto [lo, hi] = std::minmax_element(latent.begin(), latent.end());
    const double lo_v = *lo, range = *hi - *lo > 0.0 ? *hi - *lo : 1.0;
    for (auto& v : latent) v = (v - lo_v) / range;

    SyntheticFamily family;
    std::vector<double> others;
    const std::size_t n_others = spec.environments - 1;
    for (std::size_t k = 0; k < n_others; ++k) {
        const double t = n_others == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n_others - 1);
        others.push_back(spec.min_distortion + t * (spec.max_distortion - spec.min_distortion));
    }
    std::shuffle(others.begin(), others.end(), rng);
    family.distortions.resize(spec.environments);
    for (std::size_t e = 0, k = 0; e < spec.environments; ++e) {
        family.distortions[e] = e == spec.planted ? 0.0 : others[k++];
    }

    std::vector<std::string> names;
    for (std::size_t j = 0; j < spec.options; ++j) names.push_back("o" + std::to_string(j + 1));
    const auto cspace = ConfigurationSpace::infer(names, configs);
    for (std::size_t e = 0; e < spec.environments; ++e) {
        Rng noise_rng(derive_seed(spec.seed, 100 + e));
        const double d = family.distortions[e];
        std::vector<double> perf;
        perf.reserve(latent.size());
        for (double u : latent) {
            const double warped = std::pow(u, 1.0 / (1.0 + d));
            const double noise = d > 0.0 ? std::exp(spec.noise * d * gauss(noise_rng)) : 1.0;
            perf.push_back(spec.offset + spec.span * warped * noise);
        }
        family.environments.emplace_back(synthetic_env_id(e, spec.environments), spec.system, "perf",
                                         Sense::minimize, cspace, configs, std::move(perf));
    }
    family.planted_id = family.environments[spec.planted].env_id();
    return family;
}

/// Writes one CSV per environment plus `manifest.json` into `dir`.
inline Manifest write_synthetic(const SyntheticFamily& family, const SyntheticFamilySpec& spec,
                                const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    Manifest m;
    m.system = spec.system;
    m.objective = "perf";
    m.sense = Sense::minimize;
    nlohmann::json distortions = nlohmann::json::object();
    for (std::size_t e = 0; e < family.environments.size(); ++e) {
        const auto& ds = family.environments[e];
        const auto file = dir / (ds.env_id() + ".csv");
        save_environment_csv(file, ds);
        m.environments.push_back({ds.env_id(), file});
        distortions[ds.env_id()] = family.distortions[e];
    }
    m.metadata = {{"generator", "synthetic"},
                  {"seed", spec.seed},
                  {"options", spec.options},
                  {"rows", spec.rows},
                  {"active_options", spec.active_options},
                  {"noise", spec.noise},
                  {"planted_bellwether", family.planted_id},
                  {"distortions", distortions}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw Error(ErrorKind::config, "cannot write manifest in '" + dir.string() + "'");
    out << to_json(m, dir).dump(2) << '\n';
    return m;
}

}  // namespace beetle::harness
