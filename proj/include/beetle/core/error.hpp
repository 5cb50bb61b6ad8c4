#pragma once

#include <stdexcept>
#include <string>

namespace beetle {

// Two families matter to callers: configuration mistakes (bad flags,
// impossible budgets) and data problems (bad files, degenerate samples).
// The CLI maps them to exit codes 2 and 3.
enum class ErrorKind {
    config,
    budget,
    schema,
    parse,
    insufficient_data,
    lookup,
    undefined_metric,
    degenerate_fit,
    pairing,
    numeric,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config: return "configuration error";
    case ErrorKind::budget: return "budget error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::lookup: return "lookup error";
    case ErrorKind::undefined_metric: return "undefined metric";
    case ErrorKind::degenerate_fit: return "degenerate fit";
    case ErrorKind::pairing: return "pairing error";
    case ErrorKind::numeric: return "numeric error";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    bool is_configuration() const noexcept {
        return kind_ == ErrorKind::config || kind_ == ErrorKind::budget;
    }

private:
    ErrorKind kind_;
};

}  // namespace beetle
