#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kwalk {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad parameter: size out of range, malformed spec, violated precondition.
struct ArgError : Error {
    using Error::Error;
};

/// CLI-level misuse (unknown flag, missing --seed, unreadable file). Maps to exit code 2.
struct UsageError : Error {
    using Error::Error;
};

/// Edge-list document did not parse; carries the 1-based offending line.
struct ParseError : Error {
    std::size_t line;
    ParseError(std::size_t line_, const std::string& what_)
        : Error("parse error at line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

/// Random generator exhausted its retry budget without a valid sample.
struct GenerationError : Error {
    int attempts;
    GenerationError(int attempts_, const std::string& what_)
        : Error(what_ + " (after " + std::to_string(attempts_) + " attempts)"), attempts(attempts_) {}
};

/// A simulation exceeded its round cap; carries progress at the time of abort.
struct TimeoutError : Error {
    std::uint64_t rounds;
    std::uint64_t visited;
    TimeoutError(std::uint64_t rounds_, std::uint64_t visited_, const std::string& what_)
        : Error(what_ + " (round " + std::to_string(rounds_) + ", " +
                std::to_string(visited_) + " vertices visited)"),
          rounds(rounds_),
          visited(visited_) {}
};

/// An iterative solver did not converge; carries the last iterate.
struct ConvergenceError : Error {
    double last_value;
    ConvergenceError(double last, const std::string& what_)
        : Error(what_ + " (last iterate " + std::to_string(last) + ")"), last_value(last) {}
};

/// Ratio estimate whose denominator is not separated from zero.
struct UnstableRatioError : Error {
    using Error::Error;
};

/// Mixing time requested for a periodic chain without the lazy kernel.
struct PeriodicityError : Error {
    using Error::Error;
};

}  // namespace kwalk
