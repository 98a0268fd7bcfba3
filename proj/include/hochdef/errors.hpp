#pragma once

#include <stdexcept>
#include <string>

namespace hochdef {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arithmetic between elements of different fields, or mismatched shapes.
class FieldMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// An input object fails one of its defining invariants (associativity,
// functoriality, bimodule axioms, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its domain (non-cocycle passed where a
// cocycle is required, a map that is not a section, missing meets, ...).
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

// A cochain space would exceed the configured coordinate cap, or the
// requested degree is not covered by the truncation caps.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace hochdef
