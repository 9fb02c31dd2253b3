#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aloof {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (non-positive voltage,
/// height at or below the surface, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid or incomplete configuration: missing material parameters, bad unit
/// suffix, unknown element type. `line()` is 0 when no source line applies.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, std::size_t line = 0)
        : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Malformed or truncated input file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// An integrand or model produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// An iterative procedure stopped before meeting its tolerance. The best
/// estimate reached so far is carried along.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
        : Error(what), best_(best_estimate), error_(error_estimate) {}
    double best_estimate() const noexcept { return best_; }
    double error_estimate() const noexcept { return error_; }

private:
    double best_;
    double error_;
};

/// Data analysis could not produce a result (no periodicity, flat scan, empty
/// reference band).
class AnalysisError : public Error {
public:
    using Error::Error;
};

} // namespace aloof
