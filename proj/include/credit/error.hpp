#pragma once

#include <stdexcept>
#include <string>

namespace credit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV, schema, dataset shape).
class DataError : public Error {
public:
    using Error::Error;
};

/// Fitting, scoring or persistence failure.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Invalid arguments supplied by a caller.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace credit
