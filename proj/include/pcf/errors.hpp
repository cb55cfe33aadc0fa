#pragma once

#include <stdexcept>
#include <string>

namespace pcf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document or unreadable file.
class ParseError : public Error {
public:
  using Error::Error;
};

/// A mathematical invariant of the input does not hold. `invariant()` names it.
class ValidationError : public Error {
public:
  ValidationError(std::string invariant, const std::string& what)
      : Error(invariant + ": " + what), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

private:
  std::string invariant_;
};

/// A computed identity failed, or a solve broke down.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Requested depth exceeds the configured cell cap.
class CapacityError : public Error {
public:
  using Error::Error;
};

}  // namespace pcf
