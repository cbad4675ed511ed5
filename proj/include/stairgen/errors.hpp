#pragma once

#include <stdexcept>
#include <string>

namespace stairgen {

// Base of every error raised by the library. The CLI maps ConfigError and its
// subclasses to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad caller-supplied data: out-of-range token ids, empty batches, empty
// references.
class InvalidInput : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidConfig : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Corpus could not be turned into a model (empty after tokenization, reserved
// token strings).
class IngestionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// An internal precondition between two library components was broken.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace stairgen
