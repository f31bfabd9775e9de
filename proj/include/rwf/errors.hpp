#pragma once

#include <stdexcept>
#include <string>

namespace rwf {

// Bad argument values (dimension mismatch, non-positive scale, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A request the library deliberately does not handle (Haar in d > 1,
// quadrature oracle in d > 2, ...).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Factorization failures and other floating-point breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (CSV parse errors, NaN cells, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rwf
