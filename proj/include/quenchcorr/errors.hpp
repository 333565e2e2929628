#pragma once

#include <stdexcept>
#include <string>

namespace quenchcorr {

// Invalid arguments or states that violate a documented invariant.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Base for failures of a numerical method on otherwise valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature ran out of subdivisions before reaching the requested
// tolerance. Carries the best estimate and its error bound.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double estimate, double error_bound)
        : NumericalError(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

// The ODE integrator could not take a step (step size underflow).
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double time, double step)
        : NumericalError(what), time_(time), step_(step) {}

    double time() const noexcept { return time_; }
    double step() const noexcept { return step_; }

private:
    double time_;
    double step_;
};

} // namespace quenchcorr
