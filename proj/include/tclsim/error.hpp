#pragma once

#include <stdexcept>
#include <string>

namespace tclsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or violated precondition (bad dimensions, infeasible
/// parameter ranges, malformed scenario files).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: non-Hurwitz grid where one is required, singular
/// matrices, eigenvalue non-convergence, non-finite state.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Raised by the hybrid simulator when too many jumps accumulate at a single
/// time instant.
class ZenoError : public Error {
public:
    ZenoError(const std::string& what, double time, long jumps_at_instant)
        : Error(what), time_(time), jumps_(jumps_at_instant) {}

    double time() const noexcept { return time_; }
    long jumps_at_instant() const noexcept { return jumps_; }

private:
    double time_;
    long jumps_;
};

}  // namespace tclsim
