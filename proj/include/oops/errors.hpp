#pragma once

#include <stdexcept>
#include <string>

namespace oops {

// Base of every error the library throws. Subclasses exist so callers (the
// CLI in particular) can map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class MissingActionsError : public InputError {
 public:
  using InputError::InputError;
};

// exact_w1 only handles equal-size uniform measures.
class UnsupportedInstance : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class EpisodeFinished : public Error {
 public:
  using Error::Error;
};

// Non-finite loss during training.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or malformed data files.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace oops
