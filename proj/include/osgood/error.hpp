#pragma once

#include <stdexcept>
#include <string>

namespace osgood {

// Base for every error raised by the library. The CLI maps all of these to
// exit code 1; mathematical check failures are never thrown, they become
// report rows.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside a tabulated or built range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Quadrature or an iterative solve did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// The numeric Osgood classification contradicts the claimed one.
class ClassificationMismatch : public Error {
 public:
  using Error::Error;
};

// A time outside the segments that were actually built.
class HorizonError : public RangeError {
 public:
  using RangeError::RangeError;
};

// exp() of the Carleman weight exponent does not fit in a double.
class WeightOverflow : public Error {
 public:
  using Error::Error;
};

// A self-check that guards an internal identity failed (signals a bug).
class SelfCheckError : public Error {
 public:
  using Error::Error;
};

}  // namespace osgood
