#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace horizon {

/// Malformed expression text. `offset` is the byte position of the
/// first character that could not be consumed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t offset)
        : std::runtime_error(std::move(message)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation failure: unbound variable, domain error (log of a
/// non-positive value, sqrt of a negative, 0^negative, ...), or a
/// non-finite result.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver failure. `horizon_hint()` is the horizon T of the failing
/// solve when known, otherwise a negative value.
class SolveError : public std::runtime_error {
public:
    explicit SolveError(std::string message, double horizon = -1.0)
        : std::runtime_error(std::move(message)), horizon_(horizon) {}
    double horizon_hint() const noexcept { return horizon_; }

private:
    double horizon_;
};

/// Invalid run configuration or problem definition.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File format / IO failure (CSV, report JSON).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace horizon
