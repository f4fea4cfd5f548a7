#pragma once

#include <cstdint>
#include <stdexcept>

#include "rideshare/mip/linear_model.h"

namespace rideshare::mip {

// LP relaxation: integrality flags are ignored.
Solution solve_lp(const LinearModel& model, const SolverConfig& cfg = {});

// Best-first branch-and-bound. Before branching, row coefficients of integer
// variables are tightened against the variable bounds and rounds of
// mixed-integer rounding cuts (Gomory cuts when rounding finds none) are added
// at the root; none of this removes an integer-feasible point. Branches on the
// variable with the largest product of pseudocost estimates (lowest id on
// ties); nodes are re-solved with the dual simplex from the parent's basis.
Solution solve_mip(const LinearModel& model, const SolverConfig& cfg = {});

class EnumerationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumerates every integer assignment and solves the LP left in the
// continuous variables. Throws EnumerationLimitError when the product of the
// integer domain sizes exceeds max_enum.
Solution brute_force_solve(const LinearModel& model, std::int64_t max_enum,
                           const SolverConfig& cfg = {});

}  // namespace rideshare::mip
