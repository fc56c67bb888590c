#pragma once

#include <stdexcept>
#include <string>

namespace tubeflow {

// Invalid input to an operation (bad range, wrong exponent, zero measure...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computed object violates one of its own invariants.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quantity is mathematically undefined at the requested point (e.g. 0/0).
class UndefinedValueError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Inputs are valid individually but make the requested ratio meaningless.
class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace tubeflow
