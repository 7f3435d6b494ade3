#pragma once

#include <stdexcept>
#include <string>

namespace dpdncv {

/// Inputs with inconsistent shapes (row counts, coefficient lengths).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The sigma fixed point has a non-positive denominator: the weighted mass
/// of inlying observations no longer exceeds the bias correction.
class DegenerateScaleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bordered Hessian or J-matrix failed the condition-number check.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, double min_eigen, double condition)
        : std::runtime_error(what), min_eigen_(min_eigen), condition_(condition) {}

    double min_eigen() const noexcept { return min_eigen_; }
    double condition() const noexcept { return condition_; }

private:
    double min_eigen_;
    double condition_;
};

/// Adaptive quadrature stopped short of the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace dpdncv
