#pragma once

#include <stdexcept>
#include <string>

namespace brl {

// Base class for every error raised by the library. The CLI maps these onto
// exit codes (usage/config errors -> 2, everything else -> 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or vector dimensions disagree with what an operation expects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An API was called out of order (e.g. backward on an empty tape).
class UsageError : public Error {
 public:
  using Error::Error;
};

// A loss, gradient or rollout became non-finite.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Unknown names, out-of-range hyperparameters, mismatched environments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise invalid input values.
class InputError : public Error {
 public:
  using Error::Error;
};

// A GEP operation was requested before its bootstrap phase finished.
class PhaseError : public Error {
 public:
  using Error::Error;
};

// Bad magic number or unsupported version in a binary file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File content is inconsistent with its own header (truncation etc).
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed text input (CSV, reward specs).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace brl
