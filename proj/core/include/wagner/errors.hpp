#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace wagner {

/// Configuration-level failures: bad input files, malformed expressions,
/// invalid parameters. The CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : ConfigError {
    std::size_t offset;  // byte offset into the source text
    SyntaxError(const std::string& what, std::size_t off)
        : ConfigError(what + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

struct UnknownIdentifier : ConfigError {
    std::size_t offset;
    std::string name;
    UnknownIdentifier(const std::string& ident, std::size_t off)
        : ConfigError("unknown identifier '" + ident + "' (at byte " + std::to_string(off) + ")"),
          offset(off),
          name(ident) {}
};

struct UnknownSurface : ConfigError {
    using ConfigError::ConfigError;
};

struct InvalidParams : ConfigError {
    using ConfigError::ConfigError;
};

struct ChartMismatch : ConfigError {
    using ConfigError::ConfigError;
};

/// Numerical failures during evaluation or integration. Exit code 2.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateMetric : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularPoint : NumericalError {
    using NumericalError::NumericalError;
};

struct StepUnderflow : NumericalError {
    using NumericalError::NumericalError;
};

struct LeftDomain : NumericalError {
    using NumericalError::NumericalError;
};

struct MaxStepsExceeded : NumericalError {
    using NumericalError::NumericalError;
};

struct InterpolationError : NumericalError {
    using NumericalError::NumericalError;
};

struct TurningPoint : NumericalError {
    double u2_turn;
    TurningPoint(const std::string& what, double u2)
        : NumericalError(what), u2_turn(u2) {}
};

struct NonTransversal : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace wagner
