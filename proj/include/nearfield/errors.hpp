// errors.hpp — exception types shared across the library

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nearfield {

/// Argument outside the domain of a formula (omega = 0 for the skin depth, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed configuration or input file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quadrature ran out of budget. Carries the best estimate reached so far.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::complex<double> best, double error_bound)
        : std::runtime_error(what), best_(best), error_bound_(error_bound) {}

    std::complex<double> best_estimate() const { return best_; }
    double error_bound() const { return error_bound_; }

private:
    std::complex<double> best_;
    double error_bound_;
};

}  // namespace nearfield
