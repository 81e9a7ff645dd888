#pragma once

#include <stdexcept>
#include <string>

namespace altphase {

// Argument outside the operation's domain (zero vector, negative sigma, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operand sizes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation produced NaN/Inf.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller-supplied object violates a documented contract (e.g. forward/adjoint
// maps that are not adjoint to each other).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace altphase
