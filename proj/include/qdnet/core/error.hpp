#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input text (DIMACS, config files). Carries the 1-based line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line), message_(what) {}

    std::size_t line() const noexcept { return line_; }
    /// The description without the line prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::string message_;
};

/// A file could not be opened or listed.
class IoError : public Error {
public:
    using Error::Error;
};

/// The master-equation integrator lost probability beyond tolerance.
class ConservationError : public Error {
public:
    ConservationError(double time_ps, double drift)
        : Error("population accounting drifted by " + std::to_string(drift) +
                " at t=" + std::to_string(time_ps) + " ps"),
          time_ps_(time_ps), drift_(drift) {}

    double time_ps() const noexcept { return time_ps_; }
    double drift() const noexcept { return drift_; }

private:
    double time_ps_;
    double drift_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace qdnet
