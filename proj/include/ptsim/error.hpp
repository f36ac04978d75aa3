#pragma once

#include <stdexcept>
#include <string>

namespace ptsim {

/// Coarse failure category; the CLI maps it onto its exit code.
enum class ErrorKind {
    validation = 1,  // malformed input, dimension mismatch, capability limits
    numerical = 2,   // convergence or integration failure
    not_found = 3,   // no EP / no crossing in the requested range
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double residual)
        : Error(ErrorKind::numerical, what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(ErrorKind::not_found, what) {}
};

}  // namespace ptsim
