#pragma once

#include <stdexcept>
#include <string>

namespace blasso {

/// Inconsistent vector/matrix shapes.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Direction lies (numerically) in the null space of the design matrix,
/// so quantities built on ||As||_2 are undefined.
class SingularDirectionError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A numerical procedure failed to reach its target accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate
/// reached and the error bound at the point of failure.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double estimate, double error_bound,
                    int subdivisions)
        : NumericalError(what), estimate_(estimate), error_bound_(error_bound),
          subdivisions_(subdivisions) {}

    double estimate() const { return estimate_; }
    double error_bound() const { return error_bound_; }
    int subdivisions() const { return subdivisions_; }

private:
    double estimate_;
    double error_bound_;
    int subdivisions_;
};

/// File could not be read or parsed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace blasso
