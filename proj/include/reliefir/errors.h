#pragma once

#include <stdexcept>
#include <string>

namespace reliefir {

// Malformed or inconsistent input data (files, corpora, vocabularies).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf in parameters, gradients or losses.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values or contradictory options.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace reliefir
