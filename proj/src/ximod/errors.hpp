#pragma once

#include <stdexcept>
#include <string>

namespace ximod {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical target could not be met. Carries the best estimate reached and
// the error bound that was actually achievable.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, double best_estimate, double achieved_err)
      : Error(what), best_estimate_(best_estimate), achieved_err_(achieved_err) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double achieved_err() const noexcept { return achieved_err_; }

 private:
  double best_estimate_;
  double achieved_err_;
};

// A moment table does not hold the moment order an operation needs.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class CacheError : public Error {
 public:
  using Error::Error;
};

}  // namespace ximod
