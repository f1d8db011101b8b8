#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace llr {

/// Base class of all library exceptions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: files, configs, violated call contracts.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical conditions that prevent a meaningful result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Text input that could not be parsed; carries the 1-based line number.
class ParseError : public DataError {
public:
    ParseError(const std::string& msg, std::size_t line)
        : DataError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MissingSiteError : public DataError {
public:
    using DataError::DataError;
};

class DuplicateSiteError : public DataError {
public:
    using DataError::DataError;
};

class DimensionMismatchError : public DataError {
public:
    using DataError::DataError;
};

class NonFiniteValueError : public DataError {
public:
    using DataError::DataError;
};

class ConfigError : public DataError {
public:
    using DataError::DataError;
};

class LagOutOfMarginError : public DataError {
public:
    using DataError::DataError;
};

class UnsupportedMomentError : public DataError {
public:
    using DataError::DataError;
};

class ZeroDensityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroVarianceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularMatrixError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateSignalError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientReplicationsError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AllFitsFailedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace llr
