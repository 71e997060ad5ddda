#pragma once

#include <stdexcept>
#include <string>

namespace poseref {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// A 3D point fell at or behind the camera plane (z <= min depth).
class BehindCameraError : public Error {
 public:
  using Error::Error;
};

class InvalidDepthError : public Error {
 public:
  using Error::Error;
};

/// Rotation angle within tolerance of pi; the principal log branch is
/// ill-defined there and callers must handle the condition explicitly.
class DegenerateRotationError : public Error {
 public:
  using Error::Error;
};

class EmptyViewError : public Error {
 public:
  using Error::Error;
};

class SceneGenerationError : public Error {
 public:
  using Error::Error;
};

class UnderdeterminedProblemError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace poseref
