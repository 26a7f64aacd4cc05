#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (transform, MGF region of convergence).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (negative rate, theta outside [0,1], ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Quantity undefined for the configuration, e.g. the preempted-service
/// sojourn when preemption cannot happen.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Richardson extrapolation did not settle.
class PrecisionError : public Error {
public:
    using Error::Error;
};

/// Simulation summaries with different system configurations were merged.
class ConfigMismatchError : public Error {
public:
    using Error::Error;
};

/// Malformed distribution spec or other textual input.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace aoi
