#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace inlsc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string constraint, const std::string& what)
      : Error(what), constraint_(std::move(constraint)) {}
  // Name of the violated constraint: "d", "b", "sigma", "c" or "omega".
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

class NonFiniteField : public Error {
 public:
  using Error::Error;
};

class DegenerateField : public Error {
 public:
  using Error::Error;
};

class SupportLoss : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class CertificationFailure : public Error {
 public:
  using Error::Error;
};

class StepFailure : public Error {
 public:
  using Error::Error;
};

// An experiment whose entry conditions do not hold numerically.
class RefusesRun : public Error {
 public:
  using Error::Error;
};

}  // namespace inlsc
