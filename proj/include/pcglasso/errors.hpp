#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcglasso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments or inconsistent dimensions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or unusable input data (CSV contents, zero-variance columns).
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure broke down (degenerate fit, root finder failure).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Cholesky factorization hit a non-positive pivot.
class NotPositiveDefinite : public NumericalError {
public:
    NotPositiveDefinite(std::size_t pivot, double value)
        : NumericalError("matrix is not positive definite: pivot " + std::to_string(pivot) +
                         " is " + std::to_string(value)),
          pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

}  // namespace pcglasso
