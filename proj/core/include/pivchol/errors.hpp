#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pivchol {

// Bad arguments: dimension mismatches, out-of-range indices, invalid configs.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base class for failures of the numerical routines themselves.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The selected pivot's Schur-complement diagonal fell below the rank
// tolerance. The factor computed so far is still valid.
class PivotBreakdown : public NumericalError {
 public:
  PivotBreakdown(std::ptrdiff_t achieved_rank, double pivot_value)
      : NumericalError("pivot breakdown at rank " + std::to_string(achieved_rank) +
                       " (Schur diagonal " + std::to_string(pivot_value) + ")"),
        achieved_rank_(achieved_rank),
        pivot_value_(pivot_value) {}

  std::ptrdiff_t achieved_rank() const noexcept { return achieved_rank_; }
  double pivot_value() const noexcept { return pivot_value_; }

 private:
  std::ptrdiff_t achieved_rank_;
  double pivot_value_;
};

class NumericalDivergence : public NumericalError {
 public:
  NumericalDivergence(std::ptrdiff_t iteration, const std::string& what)
      : NumericalError("non-finite value at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::ptrdiff_t iteration() const noexcept { return iteration_; }

 private:
  std::ptrdiff_t iteration_;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AssumptionViolated : public NumericalError {
 public:
  AssumptionViolated(std::ptrdiff_t row, std::ptrdiff_t col, const std::string& what)
      : NumericalError(what + " at (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  std::ptrdiff_t row() const noexcept { return row_; }
  std::ptrdiff_t col() const noexcept { return col_; }

 private:
  std::ptrdiff_t row_;
  std::ptrdiff_t col_;
};

}  // namespace pivchol
