#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ttutv {

/// Base class for all library errors; catch this to map failures to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument value (bad dims, rank chain, weights, domain violations).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Out-of-range multi-index or linear index.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Malformed file content; carries the byte (or line) offset of the defect.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::int64_t offset)
        : Error(msg + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::int64_t offset() const noexcept { return offset_; }

private:
    std::int64_t offset_ = 0;
};

/// Iteration caps exhausted, non-convergence and similar numerical failures.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A size cap would be exceeded (dense materialization, accumulator growth).
class ResourceError : public Error {
public:
    using Error::Error;
};

/// A checked internal invariant does not hold; message carries both sides.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace ttutv
