#ifndef SREHM_ERROR_HPP
#define SREHM_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace srehm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad range, bad shape, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Run configuration could not be parsed or failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Usage trace could not be read, parsed or validated.
class TraceError : public Error {
public:
    TraceError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    /// 1-based line number of the offending row, 0 when not line-specific.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A placement or migration has no feasible destination.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Power iteration did not reach the tolerance within the iteration budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate)
        : Error(what), last_(std::move(last_iterate)) {}

    const std::vector<double>& last_iterate() const noexcept { return last_; }

private:
    std::vector<double> last_;
};

}  // namespace srehm

#endif  // SREHM_ERROR_HPP
