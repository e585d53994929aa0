#pragma once

#include <stdexcept>
#include <string>

namespace pixelhand {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, channel counts or parameters that do not fit together.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A rectangle with (near) zero width or height.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed text or binary input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Missing or unreadable files.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Scene generation could not satisfy its constraints.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given input (e.g. no ground truth).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace pixelhand
