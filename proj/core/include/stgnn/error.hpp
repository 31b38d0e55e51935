#pragma once

#include <stdexcept>
#include <string>

namespace stgnn {

/// Base of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class dimension_error : public error {
public:
    using error::error;
};

/// Input violates a documented precondition (bad index, bad weight).
class validation_error : public error {
public:
    using error::error;
};

/// A computation produced NaN or Inf.
class numeric_error : public error {
public:
    using error::error;
};

/// Tabular input missing required columns or holding unparsable cells.
class schema_error : public error {
public:
    using error::error;
};

/// Configuration outside its allowed range.
class config_error : public error {
public:
    using error::error;
};

/// Not enough data to build the requested samples or splits.
class empty_input_error : public error {
public:
    using error::error;
};

/// File could not be read, written, or decoded.
class io_error : public error {
public:
    using error::error;
};

} // namespace stgnn
