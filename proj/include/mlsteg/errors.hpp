#pragma once

#include <stdexcept>
#include <string>

namespace mlsteg {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside its documented domain (bit counts, ratios, keys).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A byte or bit container has the wrong length for the operation.
class SizeError : public Error {
public:
    using Error::Error;
};

/// A configuration violates a cross-field constraint.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The call cannot carry the requested steganogram.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Malformed trace, frame or config input.
class ParseError : public Error {
public:
    using Error::Error;
};

class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

} // namespace mlsteg
