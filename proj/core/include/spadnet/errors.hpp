#pragma once

#include <stdexcept>
#include <string>

namespace spadnet {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition (negative rate, intensity
/// outside [0,1], invalid config, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Tensor or sequence dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Observed pixel values do not fit any supported bit depth.
class UnsupportedBitDepthError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Filesystem or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// On-disk data is malformed. Subclasses identify the specific fault.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Structured-text document could not be parsed; message carries line context.
class ParseError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// A checkpoint does not match the architecture it is loaded into.
class ConfigMismatchError : public Error {
 public:
  using Error::Error;
};

/// Training diverged.
class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(long step, double learning_rate)
      : Error("non-finite loss at step " + std::to_string(step) +
              " (learning_rate=" + std::to_string(learning_rate) + ")"),
        step_(step),
        learning_rate_(learning_rate) {}

  [[nodiscard]] long step() const noexcept { return step_; }
  [[nodiscard]] double learning_rate() const noexcept { return learning_rate_; }

 private:
  long step_;
  double learning_rate_;
};

}  // namespace spadnet
