#pragma once

#include <stdexcept>
#include <string>

namespace fracprop {

/// Argument outside the supported mathematical domain (e.g. beta > 1, x > 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Mismatched spatial dimension, component count or sample count.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quadrature or inversion could not reach the requested tolerance.
class ToleranceError : public std::runtime_error {
public:
    ToleranceError(const std::string& what, double achieved, double requested)
        : std::runtime_error(what), achieved_(achieved), requested_(requested) {}

    double achieved() const noexcept { return achieved_; }
    double requested() const noexcept { return requested_; }

private:
    double achieved_;
    double requested_;
};

/// Operation attempted on a system that failed validation.
class InvalidSystemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace fracprop
