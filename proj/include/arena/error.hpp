#pragma once

#include <stdexcept>
#include <string>

namespace arena {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: bad shapes, off-grid values, invalid parameters, bad config.
struct InputError : Error {
  using Error::Error;
};
struct ShapeError : InputError {
  using InputError::InputError;
};
struct DomainError : InputError {
  using InputError::InputError;
};
struct GridError : InputError {
  using InputError::InputError;
};
struct ParameterError : InputError {
  using InputError::InputError;
};
struct ConfigError : InputError {
  using InputError::InputError;
};

// Failures discovered while computing: LP stalls, broken invariants, misuse of state.
struct NumericError : Error {
  using Error::Error;
};
struct HorizonError : Error {
  using Error::Error;
};

}  // namespace arena
