#pragma once

#include <stdexcept>
#include <string>

namespace dualview {

/// Caller broke a documented precondition (dimension mismatch, empty input, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite or non-PSD result, or hit a singular system.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fusion inputs that cannot be combined (singular joint covariance or information matrix).
class DegenerateInput : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Malformed or out-of-range configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dualview
