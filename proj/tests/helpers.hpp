#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "beetle/core/dataset.hpp"

namespace beetle::test {

inline std::vector<std::string> option_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("o" + std::to_string(i + 1));
    return names;
}

inline EnvironmentDataset make_env(const std::string& id, const std::vector<std::vector<double>>& rows,
                                   const std::vector<double>& perf, Sense sense = Sense::minimize) {
    std::vector<Configuration> cs;
    for (const auto& r : rows) cs.push_back(Configuration{r});
    const auto space = ConfigurationSpace::infer(option_names(rows.at(0).size()), cs);
    return EnvironmentDataset(id, "test", "perf", sense, space, cs, perf);
}

/// Every configuration of `n` binary options; option j of row r is bit j of r.
inline std::vector<std::vector<double>> binary_rows(std::size_t n) {
    std::vector<std::vector<double>> rows;
    for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
        std::vector<double> r;
        for (std::size_t j = 0; j < n; ++j) r.push_back(static_cast<double>((code >> j) & 1U));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline EnvironmentDataset binary_env(const std::string& id, std::size_t n,
                                     const std::function<double(const std::vector<double>&)>& f,
                                     Sense sense = Sense::minimize) {
    const auto rows = binary_rows(n);
    std::vector<double> perf;
    for (const auto& r : rows) perf.push_back(f(r));
    return make_env(id, rows, perf, sense);
}

/// A scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("beetle-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename Fn>
ErrorKind error_kind(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    throw std::runtime_error("expected a beetle::Error");
}

}  // namespace beetle::test
