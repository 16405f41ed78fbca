#pragma once

#include <stdexcept>
#include <string>

namespace umarm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTwistError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when a relative rotation cannot be produced by a two-axis U-joint.
class ExtractionError : public Error {
 public:
  ExtractionError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class SimulationFault : public Error {
 public:
  using Error::Error;
};

class ExperimentError : public Error {
 public:
  using Error::Error;
};

}  // namespace umarm
