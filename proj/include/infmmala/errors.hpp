#pragma once

#include <stdexcept>
#include <string>

namespace infmmala {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear algebra / model domain errors.
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct InvalidPins : Error {
  using Error::Error;
};
struct OffGridTime : Error {
  using Error::Error;
};
struct UnsupportedModel : Error {
  using Error::Error;
};
struct EmptyChain : Error {
  using Error::Error;
};
struct NonInvertibleObsMap : Error {
  using Error::Error;
};

// Configuration errors (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};
struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};
struct ValidationError : ConfigError {
  explicit ValidationError(const std::string& field, const std::string& what)
      : ConfigError(field + ": " + what), field(field) {}
  std::string field;
};

// Filesystem errors (CLI exit code 4).
struct IoError : Error {
  using Error::Error;
};

}  // namespace infmmala
