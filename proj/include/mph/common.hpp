#pragma once

#include <stdexcept>
#include <string>

namespace mph {

// Thrown when tensor/table dimensions do not line up.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a value is outside the operation's domain (non-finite input,
// action outside support, infeasible parameter).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on API misuse (stepping a finished episode, zero eval episodes).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mph
