#pragma once

#include <stdexcept>
#include <string>

namespace specbench {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Retryable backend failure (connection loss, 5xx, rate limiting).
class TransientError : public Error {
 public:
  using Error::Error;
};

/// Authentication / authorization failure. Never retried.
class AuthError : public Error {
 public:
  using Error::Error;
};

/// Backend answered but the payload does not follow the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace specbench
