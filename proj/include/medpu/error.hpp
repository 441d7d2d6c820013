#pragma once

#include <stdexcept>
#include <string>

namespace medpu {

// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that is empty where at least one element is required.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Input that is present but geometrically unusable (zero extent, zero area,
// all points coincident).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Argument outside the documented domain of an operation.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// File and format failures (unreadable file, malformed header, truncation).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace medpu
