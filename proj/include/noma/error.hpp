#pragma once

#include <stdexcept>
#include <string>

namespace noma {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid system parameters or sweep configuration. `key()` names the
/// offending field when one is known.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A conditional metric was requested but its conditioning event never
/// occurred.
class EmptyDenominator : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature hit its refinement limit above the requested
/// tolerance.
class ToleranceNotMet : public Error {
public:
    ToleranceNotMet(const std::string& what, double error_estimate)
        : Error(what), error_estimate_(error_estimate) {}

    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

}  // namespace noma
