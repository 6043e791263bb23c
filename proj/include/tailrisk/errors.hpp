#pragma once

#include <stdexcept>
#include <string>

namespace tailrisk {

// Base class for all library errors. The message names the violated
// precondition so CLI callers can surface it verbatim.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument, malformed configuration, or out-of-contract input shape.
struct ParameterError : Error {
    explicit ParameterError(const std::string& what) : Error(what) {}
};

// Sample-set problems: empty input, too few observations, degenerate data.
struct SampleError : Error {
    explicit SampleError(const std::string& what) : Error(what) {}
};

// Quantity undefined for the given parameters (moments, divergent integrals,
// infeasible moment regions, thresholds outside the support).
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Queueing stability condition violated. Carries the offending product or
// rate comparison so callers can report how far from stable they are.
struct InstabilityError : Error {
    double offending_value;
    InstabilityError(const std::string& what, double value)
        : Error(what), offending_value(value) {}
};

// Instance too large for an exhaustive method.
struct SizeError : Error {
    explicit SizeError(const std::string& what) : Error(what) {}
};

}  // namespace tailrisk
