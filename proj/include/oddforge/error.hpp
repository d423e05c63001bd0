#pragma once

#include <stdexcept>
#include <string>

namespace oddforge {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates an operation's precondition (non-finite, out of range).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A mathematical domain restriction was hit (e.g. tan at 90 degrees).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration (unknown runway, missing georef).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A file parsed but its content is unusable as a whole.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A generated trajectory frame left the approach cone.
class GenerationError : public Error {
 public:
  GenerationError(std::size_t frame, std::string parameter, const std::string& what)
      : Error(what), frame_(frame), parameter_(std::move(parameter)) {}

  std::size_t frame() const noexcept { return frame_; }
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::size_t frame_;
  std::string parameter_;
};

/// A check cannot run on the data it was given.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

class InvalidLabelError : public Error {
 public:
  using Error::Error;
};

class DegenerateBboxError : public Error {
 public:
  using Error::Error;
};

/// The same image id appears in two splits that must be disjoint.
class SplitIntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace oddforge
