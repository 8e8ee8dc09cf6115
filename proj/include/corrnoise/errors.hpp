// errors.hpp - exception types shared by every corrnoise module

#pragma once

#include <stdexcept>
#include <string>

namespace corrnoise {

// Bad input: out-of-range indices, malformed configs, inconsistent sizes.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to meet its accuracy contract (quadrature,
// step-halving convergence, NaN in a trajectory, degenerate fits).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : NumericalError(what + " (achieved error " + std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

} // namespace corrnoise
