#pragma once

#include <stdexcept>
#include <string>

namespace ovml {

// Base for all library errors so callers can catch one type at the CLI edge.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor extents do not line up; message names the offending axes.
struct ShapeError : Error {
  using Error::Error;
};

// A precondition of an operation was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

// Non-finite values where finite ones are required.
struct NumericError : Error {
  using Error::Error;
};

// Bad configuration file or field; message carries the field path.
struct ConfigError : Error {
  using Error::Error;
};

// Checkpoint / wire data that cannot be decoded.
struct FormatError : Error {
  using Error::Error;
};

}  // namespace ovml
