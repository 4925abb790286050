#pragma once

#include <stdexcept>
#include <string>

namespace tlc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or incomplete run configuration. Carries the offending key path.
class ConfigError : public Error {
public:
    ConfigError(std::string key_path, const std::string& what)
        : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(std::move(key_path)) {}

    const std::string& key_path() const { return key_path_; }

private:
    std::string key_path_;
};

/// A physical or numerical parameter outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An operation needs state that has not been configured (e.g. the sector boundary).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// A solver did not reach a stationary or converged answer.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const { return residual_; }

private:
    double residual_;
};

/// Adaptive step size collapsed below the floor.
class StiffnessError : public Error {
public:
    using Error::Error;
};

/// Generic floating-point breakdown (norm underflow and friends).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A projector onto a Fock sector has vanishing weight in the given state.
class EmptySectorError : public Error {
public:
    using Error::Error;
};

/// Mean-field right-hand side evaluated at a singular point (zero radius).
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Rates do not produce three distinct positive mean-field radii.
class DegenerateRadiiError : public Error {
public:
    using Error::Error;
};

/// An input violates an operation's documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace tlc
