#pragma once

#include <stdexcept>
#include <string>

namespace hardatt {

// Malformed input data: bad lines, empty lemmas, unreadable files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch or non-finite value inside the numeric core.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An action sequence that cannot be executed against a lemma.
class TransitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration (missing pool cell, bad flag values, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hardatt
