#pragma once

#include <stdexcept>
#include <string>

namespace smlab {

// Exit codes used by the command line driver.
enum class ExitCode : int { pass = 0, fail = 1, config = 2, budget = 3 };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::fail; }
};

// Malformed configuration, bad parameters, violated preconditions.
class ConfigError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::config; }
};

// Point budget or eigensolver budget exceeded.
class BudgetError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::budget; }
};

// A mathematical precondition does not hold (e.g. Re z <= 0, rho on the spectrum).
class DomainError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::config; }
};

// Quadrature or eigensolver failed to converge, or a result is not finite.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace smlab
