#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tcqpt {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration or a violated precondition.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to produce a result.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Newton-type iteration did not converge. Carries the last iterate in the
/// solver's own coordinates.
class NoRootError : public SolverError {
public:
    NoRootError(const std::string& what, std::vector<double> last_iterate, double last_residual)
        : SolverError(what), last_iterate_(std::move(last_iterate)), last_residual_(last_residual) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    std::vector<double> last_iterate_;
    double last_residual_;
};

/// Adaptive step size collapsed below the representable resolution.
class StiffnessError : public SolverError {
public:
    StiffnessError(const std::string& what, double time, double step)
        : SolverError(what), time_(time), step_(step) {}

    double time() const noexcept { return time_; }
    double step() const noexcept { return step_; }

private:
    double time_;
    double step_;
};

}  // namespace tcqpt
