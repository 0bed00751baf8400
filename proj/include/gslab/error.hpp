#pragma once

#include <stdexcept>
#include <string>

namespace gslab {

/// Base of every error raised by the library. Each subclass maps to one of the
/// error classes named in the module contracts.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested size exceeds a configured cap, or a dimension is zero.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// Inputs that do not belong together: unknown edge, vertex out of range,
/// lattice mismatch, a non-cycle passed as a cycle.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class UnsupportedKindError : public Error {
 public:
  using Error::Error;
};

/// Two candidate energies (or coupling values) agree within the tie tolerance.
class DegenerateDisorderError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A postcondition check failed; indicates a solver bug or a tolerance breach.
class VerificationError : public Error {
 public:
  using Error::Error;
};

/// Bisection saw membership that is not monotone in the coupling value.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// Unknown suite, unregistered event, malformed spec string.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gslab
