#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rhsb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A symbolic or numeric resource limit (order cap, expression budget) was hit.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// A linear system was too ill-conditioned to trust.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Adaptive quadrature did not reach its tolerance. Carries the best estimate.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, std::complex<double> best, double achieved)
        : Error(what), best_(best), achieved_(achieved) {}
    std::complex<double> best_estimate() const noexcept { return best_; }
    double achieved_error() const noexcept { return achieved_; }

private:
    std::complex<double> best_;
    double achieved_;
};

}  // namespace rhsb
