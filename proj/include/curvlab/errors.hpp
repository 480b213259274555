#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

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

class ParameterError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Malformed campaign configuration; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A sampled estimate found no admissible value within its budget.
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace curvlab
