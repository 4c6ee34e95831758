#pragma once

#include <stdexcept>
#include <string>

namespace adahuber {

/// Malformed input file (CSV or JSON). The message names the offending location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced NaN/Inf or hit a singular quantity it must divide by.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lepski's rule found no admissible grid index and no fallback was requested.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adahuber
