// Error types shared across the simulation modules.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace znsim {

// A simulated path exceeded the blow-up guard; carries the offending step.
class DivergedError : public std::runtime_error {
public:
    DivergedError(std::string what, std::size_t step_index)
        : std::runtime_error(std::move(what)), step_index(step_index) {}

    std::size_t step_index;
};

// A numerical routine failed beyond recovery (e.g. a covariance factorization).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested parameters violate the drift/noise regime condition.
class RegimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configuration file could not be parsed or validated.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace znsim
