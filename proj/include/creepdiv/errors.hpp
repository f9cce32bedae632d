#pragma once

#include <stdexcept>
#include <string>

namespace creepdiv {

/// Input or model rejected before any numerics ran. The CLI maps this to exit 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine could not deliver its contract. The CLI maps this to exit 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidModel : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidConfig : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class HJBViolation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DivergentIntegral : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PoleEvaluation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RootIsolationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BoundaryMismatch : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BracketFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PowerOverflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace creepdiv
