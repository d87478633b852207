#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace braggsqueeze {

/// Invalid configuration values or an unreadable/malformed config file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver step produced non-finite values.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::int64_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

/// Field energy was still inside the grating (or left the domain) when an
/// observable that assumes a finished transit was requested.
class ContainmentError : public std::runtime_error {
public:
    ContainmentError(const std::string& what, double residual, double leaked)
        : std::runtime_error(what), residual_(residual), leaked_(leaked) {}

    double residual() const noexcept { return residual_; }
    double leaked() const noexcept { return leaked_; }

private:
    double residual_;
    double leaked_;
};

/// Fields or trajectories that live on different grids were combined.
class GridMismatch : public std::invalid_argument {
public:
    explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Projection or measurement that is not defined for the given data.
class MeasurementError : public std::runtime_error {
public:
    explicit MeasurementError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace braggsqueeze
