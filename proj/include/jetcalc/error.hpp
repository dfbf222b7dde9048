#pragma once

#include <stdexcept>
#include <string>

namespace jetcalc {

/// Base class for every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live on charts of different dimension, or a tuple has the wrong length.
class dimension_error : public error {
public:
    using error::error;
};

/// A jet order is out of range for the requested operation.
class order_error : public error {
public:
    using error::error;
};

/// Base points of two jets (or the chaining of two arrows) do not match.
class base_point_error : public error {
public:
    using error::error;
};

/// Input violates a mathematical precondition (singular matrix, non-ideal, ...).
class domain_error : public error {
public:
    using error::error;
};

/// A requested computation exceeds the declared desk-scale bounds.
class resource_error : public error {
public:
    using error::error;
};

} // namespace jetcalc
