#pragma once

#include <stdexcept>
#include <string>

namespace sgpt {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A distribution was evaluated on the null cone |t| = |x|.
class OnConeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class CoincidentPointError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class EqualTimesError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

/// beta in [1, 2): needs renormalization, which this library does not do.
class SuperrenormalizableRegime : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class SingularHitBudgetExceeded : public Error {
public:
    using Error::Error;
};

class VarianceBlowup : public Error {
public:
    using Error::Error;
};

class FieldModeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace sgpt
