#pragma once

#include <stdexcept>
#include <string>

namespace smallball {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to reach its accuracy contract
/// (factorization breakdown, unstable inversion, rejection cap hit).
class NumericError : public Error {
public:
    using Error::Error;
};

/// A sampled subordinator path does not reach the requested level.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// A grid or path would exceed a configured size cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

}  // namespace smallball
