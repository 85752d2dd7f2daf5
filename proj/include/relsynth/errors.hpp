#pragma once

#include <stdexcept>
#include <string>

namespace relsynth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the node store exceeds its configured soft cap.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// Interface signatures that an operator cannot accept.
class SignatureError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized predicates/interfaces or config files.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace relsynth
