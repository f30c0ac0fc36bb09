#pragma once

#include <stdexcept>
#include <string>

namespace gemlaw {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A domain invariant was violated (e.g. a model shape that the
/// architecture constraints rule out). The message names the constraint.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// An operation was called with inputs that violate its preconditions
/// (too few samples, missing fields, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The input is structurally valid but degenerate for the requested
/// computation (e.g. fewer than two distinct x values for a line fit).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A file or stream could not be parsed at all (as opposed to individual
/// bad rows, which are collected and reported).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Every optimizer start failed; the message carries per-start diagnostics.
class FitFailureError : public Error {
 public:
  using Error::Error;
};

}  // namespace gemlaw
