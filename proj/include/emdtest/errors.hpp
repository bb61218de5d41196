#pragma once

#include <stdexcept>
#include <string>

namespace emdtest {

// All library errors derive from Error so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

struct NormalizationError : Error {
    using Error::Error;
};

struct DomainMismatch : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};

struct SolverFailure : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ParamError : Error {
    using Error::Error;
};

struct SupportError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

}  // namespace emdtest
