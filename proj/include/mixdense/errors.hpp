#pragma once

#include <stdexcept>
#include <string>

namespace mixdense {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, p < 1, nonpositive scale.
class InputError : public Error {
public:
    using Error::Error;
};

/// An object violates one of its stated invariants (e.g. non-simplex weights).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Request exceeds a hard resource guard (node or cell count).
class ResourceError : public Error {
public:
    using Error::Error;
};

/// A required property of an input is missing (e.g. tail parameters).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Construction produced an inadmissible intermediate (negative cell weight).
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A parameter search ran out of budget before its predicate held.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, std::string partial_trace = {})
        : Error(what), partial_(std::move(partial_trace)) {}

    /// Human-readable state of the search when it gave up.
    const std::string& partial_trace() const noexcept { return partial_; }

private:
    std::string partial_;
};

}  // namespace mixdense
