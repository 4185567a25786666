#pragma once

#include <stdexcept>
#include <string>

namespace tbma {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong" can catch this; the subclasses let tests and
// the experiment runner distinguish the failure category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite input, non-positive power, negative sigma, ...
class InputDomainError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Mismatched lengths or layouts.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A recovered type carries no mass, so no statistic can be formed.
class DegenerateTypeError : public Error {
 public:
  using Error::Error;
};

// Sequence whose statistic is undefined (e.g. PAPR of an all-zero stream).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Sample stream not partitioned into whole symbols.
class FramingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Local training produced a non-finite loss or parameter.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int device, int round)
      : Error(what), device_(device), round_(round) {}

  int device() const noexcept { return device_; }
  int round() const noexcept { return round_; }

 private:
  int device_;
  int round_;
};

// IDX container errors.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration did not match the documented schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace tbma
