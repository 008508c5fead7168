#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slln {

// Bad numeric parameter (gamma <= 0, delta outside (0,3), k_max < 2, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Request for zero variates.
class EmptyRequestError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Index outside the admissible range of an oracle or estimator.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Input violates a documented precondition (unsorted sample, non-monotone rule).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// y0 is not above the sample maximum.
class EndpointViolation : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class DecompositionError : public std::runtime_error {
 public:
  DecompositionError(const std::string& what, std::size_t row, std::size_t col)
      : std::runtime_error(what), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A limit or series was demanded as a number but the evaluator flagged divergence.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slln
