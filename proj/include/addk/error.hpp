#pragma once

#include <stdexcept>
#include <string>

namespace addk {

enum class ErrorKind {
  Format,
  Validation,
  UnsupportedDtype,
  Dimension,
  NonPositiveMax,
  Parameter,
  Io,
  NotFound,
};

const char *to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind is what
/// the C API and the CLI dispatch on; the message is for humans.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Malformed container. Carries the byte offset at which parsing gave up.
class FormatError : public Error {
public:
  FormatError(const std::string &what, std::size_t offset)
      : Error(ErrorKind::Format,
              what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// Raised when a map that must be max-normalized has max <= 0.
class NonPositiveMaxError : public Error {
public:
  explicit NonPositiveMaxError(double maximum);

  double maximum() const noexcept { return maximum_; }

private:
  double maximum_;
};

} // namespace addk
