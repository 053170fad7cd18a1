#pragma once

#include <stdexcept>
#include <string>

namespace ots {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (bad JSON, wrong types, unknown keys).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An enumeration refused to run because its output would exceed the cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Inconsistent arguments handed to a model builder.
class ModelError : public Error {
public:
    using Error::Error;
};

} // namespace ots
