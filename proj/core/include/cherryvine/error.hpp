#pragma once

#include <stdexcept>
#include <string>

namespace cherryvine {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the mathematical domain of an operation: an invalid
/// structure, a copula parameter out of range, an unattainable Kendall tau.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input (files, matrices of the wrong shape,
/// unknown vertices).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: non-convergence, non-finite intermediate.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant that construction should guarantee was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace cherryvine
