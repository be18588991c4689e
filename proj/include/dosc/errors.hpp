#pragma once

#include <stdexcept>
#include <string>

namespace dosc {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto its exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad parameters, dimension mismatch, schema violations.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A physics validity gate tripped: truncation leakage, spurious degeneracy,
// cutoff too small for the requested levels, undersampled trajectory,
// non-positive operator under a square root.
class PhysicsGateError : public Error {
public:
    using Error::Error;
};

// The numerics themselves failed (eigensolver residual, norm drift).
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace dosc
