#pragma once

#include <stdexcept>
#include <string>

namespace fedprune {

// Rejected argument values (empty batches, out-of-range ids, bad counts).
struct InputDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Incompatible matrix/mask dimensions.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed serialized payloads (wrong byte counts, bad headers).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values, failed factorizations, diverged training.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inconsistent client/server payloads inside a federation round.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fedprune
