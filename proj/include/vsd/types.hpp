#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace vsd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Sample sets are stored one sample per row (n x d).
using Samples = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated preconditions: out-of-range indices, bad dimensions, invalid parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class LinalgError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Raised when training loss or a sampler state stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step) : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace vsd
