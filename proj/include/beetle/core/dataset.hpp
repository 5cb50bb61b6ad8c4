#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "beetle/core/error.hpp"

namespace beetle {

enum class Sense { minimize, maximize };

inline Sense parse_sense(const std::string& text) {
    if (text == "min" || text == "minimize") return Sense::minimize;
    if (text == "max" || text == "maximize") return Sense::maximize;
    throw Error(ErrorKind::config, "unknown objective sense '" + text + "' (expected min or max)");
}

inline const char* to_string(Sense sense) { return sense == Sense::minimize ? "min" : "max"; }

/// One assignment of values to every option of a space, in option order.
struct Configuration {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (double v : c.values) {
            h ^= std::hash<double>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

/// Sorted set of values an option takes.
class OptionDomain {
public:
    OptionDomain() = default;
    explicit OptionDomain(std::vector<double> values) : values_(std::move(values)) {
        std::sort(values_.begin(), values_.end());
        values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
    }

    const std::vector<double>& values() const noexcept { return values_; }
    bool empty() const noexcept { return values_.empty(); }
    double min() const { return values_.front(); }
    double max() const { return values_.back(); }

    bool is_binary() const {
        return std::all_of(values_.begin(), values_.end(),
                           [](double v) { return v == 0.0 || v == 1.0; });
    }

    bool contains(double v) const { return std::binary_search(values_.begin(), values_.end(), v); }

    OptionDomain merged(const OptionDomain& other) const {
        std::vector<double> all = values_;
        all.insert(all.end(), other.values_.begin(), other.values_.end());
        return OptionDomain(std::move(all));
    }

private:
    std::vector<double> values_;
};

class ConfigurationSpace {
public:
    ConfigurationSpace() = default;

    ConfigurationSpace(std::vector<std::string> names, std::vector<OptionDomain> domains)
        : names_(std::move(names)), domains_(std::move(domains)) {
        if (names_.size() != domains_.size()) {
            throw Error(ErrorKind::schema, "option names and domains differ in length");
        }
        std::unordered_set<std::string> seen;
        for (const auto& name : names_) {
            if (name.empty()) throw Error(ErrorKind::schema, "empty option name");
            if (!seen.insert(name).second) {
                throw Error(ErrorKind::schema, "duplicate option name '" + name + "'");
            }
        }
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<OptionDomain>& domains() const noexcept { return domains_; }
    const OptionDomain& domain(std::size_t i) const { return domains_.at(i); }

    bool all_binary() const {
        return std::all_of(domains_.begin(), domains_.end(),
                           [](const OptionDomain& d) { return d.is_binary(); });
    }

    bool same_options(const ConfigurationSpace& other) const { return names_ == other.names_; }

    bool contains(const Configuration& c) const {
        if (c.size() != size()) return false;
        for (std::size_t i = 0; i < size(); ++i) {
            if (!domains_[i].contains(c[i])) return false;
        }
        return true;
    }

    void validate(const Configuration& c) const {
        if (c.size() != size()) {
            throw Error(ErrorKind::schema, "configuration has " + std::to_string(c.size()) +
                                               " values, space has " + std::to_string(size()) +
                                               " options");
        }
        for (std::size_t i = 0; i < size(); ++i) {
            if (!domains_[i].contains(c[i])) {
                throw Error(ErrorKind::schema, "value outside domain of option '" + names_[i] + "'");
            }
        }
    }

    /// Space whose domains are the union of both; option names must match.
    ConfigurationSpace merged(const ConfigurationSpace& other) const {
        if (!same_options(other)) throw Error(ErrorKind::schema, "option names differ between spaces");
        std::vector<OptionDomain> doms;
        doms.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) doms.push_back(domains_[i].merged(other.domains_[i]));
        return ConfigurationSpace(names_, std::move(doms));
    }

    /// Space spanning exactly the given configurations.
    static ConfigurationSpace infer(std::vector<std::string> names,
                                    const std::vector<Configuration>& configs) {
        std::vector<std::vector<double>> per_option(names.size());
        for (const auto& c : configs) {
            if (c.size() != names.size()) throw Error(ErrorKind::schema, "ragged configuration");
            for (std::size_t i = 0; i < c.size(); ++i) per_option[i].push_back(c[i]);
        }
        std::vector<OptionDomain> doms;
        doms.reserve(names.size());
        for (auto& vals : per_option) doms.emplace_back(std::move(vals));
        return ConfigurationSpace(std::move(names), std::move(doms));
    }

private:
    std::vector<std::string> names_;
    std::vector<OptionDomain> domains_;
};

/// All measured (configuration, performance) pairs of one environment.
///
/// Performance is stored twice: as measured (`performance`) and as a value to
/// minimize (`value`, the negated measurement for maximized objectives). Every
/// learner, metric and search in the library works on `value`.
class EnvironmentDataset {
public:
    EnvironmentDataset(std::string env_id, std::string system, std::string objective_name,
                       Sense sense, ConfigurationSpace space, std::vector<Configuration> configs,
                       std::vector<double> performance)
        : env_id_(std::move(env_id)),
          system_(std::move(system)),
          objective_name_(std::move(objective_name)),
          sense_(sense),
          space_(std::move(space)) {
        if (configs.size() != performance.size()) {
            throw Error(ErrorKind::schema, "configuration and performance counts differ");
        }
        // Collapse repeated configurations to their mean, keeping first-seen order.
        std::unordered_map<Configuration, std::size_t, ConfigurationHash> first;
        std::vector<double> sums;
        std::vector<std::size_t> counts;
        for (std::size_t i = 0; i < configs.size(); ++i) {
            if (!std::isfinite(performance[i])) {
                throw Error(ErrorKind::parse, "non-finite performance in environment '" + env_id_ + "'");
            }
            space_.validate(configs[i]);
            auto [it, inserted] = first.try_emplace(configs[i], configs_.size());
            if (inserted) {
                configs_.push_back(std::move(configs[i]));
                sums.push_back(performance[i]);
                counts.push_back(1);
            } else {
                sums[it->second] += performance[i];
                counts[it->second] += 1;
            }
        }
        if (configs_.size() < 2) {
            throw Error(ErrorKind::insufficient_data,
                        "environment '" + env_id_ + "' has fewer than 2 distinct configurations");
        }
        performance_.resize(configs_.size());
        values_.resize(configs_.size());
        for (std::size_t i = 0; i < configs_.size(); ++i) {
            performance_[i] = counts[i] == 1 ? sums[i] : sums[i] / static_cast<double>(counts[i]);
            values_[i] = sense_ == Sense::minimize ? performance_[i] : -performance_[i];
        }
        index_ = std::move(first);
    }

    const std::string& env_id() const noexcept { return env_id_; }
    const std::string& system() const noexcept { return system_; }
    const std::string& objective_name() const noexcept { return objective_name_; }
    Sense sense() const noexcept { return sense_; }
    const ConfigurationSpace& space() const noexcept { return space_; }

    std::size_t size() const noexcept { return configs_.size(); }
    const Configuration& configuration(std::size_t row) const { return configs_.at(row); }
    const std::vector<Configuration>& configurations() const noexcept { return configs_; }

    /// Measured performance in the objective's own units and direction.
    double performance(std::size_t row) const { return performance_.at(row); }
    std::span<const double> performances() const noexcept { return performance_; }

    /// Lower-is-better value of a row.
    double value(std::size_t row) const { return values_.at(row); }
    std::span<const double> values() const noexcept { return values_; }

    std::optional<std::size_t> find(const Configuration& c) const {
        auto it = index_.find(c);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t row_of(const Configuration& c) const {
        auto row = find(c);
        if (!row) throw Error(ErrorKind::lookup, "configuration not measured in '" + env_id_ + "'");
        return *row;
    }

    /// Same rows with every measured performance mapped through `fn`.
    template <typename Fn>
    EnvironmentDataset transformed(Fn&& fn, std::string env_id) const {
        std::vector<double> perf(performance_.size());
        for (std::size_t i = 0; i < perf.size(); ++i) perf[i] = fn(performance_[i]);
        return EnvironmentDataset(std::move(env_id), system_, objective_name_, sense_, space_,
                                  configs_, std::move(perf));
    }

private:
    std::string env_id_;
    std::string system_;
    std::string objective_name_;
    Sense sense_;
    ConfigurationSpace space_;
    std::vector<Configuration> configs_;
    std::vector<double> performance_;
    std::vector<double> values_;
    std::unordered_map<Configuration, std::size_t, ConfigurationHash> index_;
};

/// Which rows of one environment have been measured so far, and at what cost.
class SampleLedger {
public:
    explicit SampleLedger(const EnvironmentDataset& ds)
        : env_id_(ds.env_id()), mask_(ds.size(), false) {}

    SampleLedger(const EnvironmentDataset& ds, std::vector<double> row_costs)
        : SampleLedger(ds) {
        if (row_costs.size() != ds.size()) {
            throw Error(ErrorKind::config, "row cost table size does not match dataset");
        }
        row_costs_ = std::move(row_costs);
    }

    const std::string& env_id() const noexcept { return env_id_; }
    std::size_t size() const noexcept { return mask_.size(); }
    bool is_revealed(std::size_t row) const { return mask_.at(row); }
    const std::vector<std::size_t>& revealed() const noexcept { return order_; }
    std::size_t revealed_count() const noexcept { return order_.size(); }
    std::size_t unrevealed_count() const noexcept { return mask_.size() - order_.size(); }

    /// Number of measurements paid for.
    std::size_t cost() const noexcept { return order_.size(); }

    /// Cost under the per-row cost table (1 per row when none is set).
    double weighted_cost() const {
        if (row_costs_.empty()) return static_cast<double>(order_.size());
        double total = 0.0;
        for (auto row : order_) total += row_costs_[row];
        return total;
    }

    /// Marks a row measured. Returns false if it already was.
    bool reveal(std::size_t row) {
        if (row >= mask_.size()) throw Error(ErrorKind::lookup, "row index out of range");
        if (mask_[row]) return false;
        mask_[row] = true;
        order_.push_back(row);
        return true;
    }

    std::vector<std::size_t> unrevealed() const {
        std::vector<std::size_t> out;
        out.reserve(unrevealed_count());
        for (std::size_t i = 0; i < mask_.size(); ++i) {
            if (!mask_[i]) out.push_back(i);
        }
        return out;
    }

private:
    std::string env_id_;
    std::vector<bool> mask_;
    std::vector<std::size_t> order_;
    std::vector<double> row_costs_;
};

/// Lowest-value row; ties go to the lowest index.
inline std::size_t argbest(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "argbest of empty sequence");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) best = i;
    }
    return best;
}

struct Optimum {
    std::size_t row;
    Configuration configuration;
    double performance;
};

inline Optimum true_optimum(const EnvironmentDataset& ds) {
    if (ds.size() == 0) throw Error(ErrorKind::insufficient_data, "empty dataset");
    std::size_t row = argbest(ds.values());
    return {row, ds.configuration(row), ds.performance(row)};
}

}  // namespace beetle
