#pragma once

#include <stdexcept>
#include <string>

namespace fock {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two points, or a point and a function, live in different complex dimensions.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// An argument violates an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Two successive quadrature refinements disagree beyond tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The requested case has no implemented criterion (never extrapolated).
class Unsupported : public Error {
public:
    using Error::Error;
};

/// Scenario configuration is malformed; `what()` carries the field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace fock
