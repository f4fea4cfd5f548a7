#pragma once

#include <vector>

#include "rideshare/mip/linear_model.h"
#include "rideshare/mip/lp_engine.h"

namespace rideshare::mip {

// sum(terms) >= rhs
struct Cut {
  std::vector<Term> terms;
  double rhs = 0.0;
};

// Gomory mixed-integer cuts read from the rows of the current optimal basis
// of lp (built on model) whose basic integer variable is fractional. At most
// max_cuts, most fractional rows first. Every cut is violated by the current
// relaxation point and satisfied by every integer-feasible point.
std::vector<Cut> gomory_cuts(const LinearModel& model, LpEngine& lp, int max_cuts,
                             double integrality_tol);

// Complemented mixed-integer rounding cuts from the rows of model, alone or
// aggregated with rows that eliminate a continuous variable strictly inside its
// bounds. Bounds are those held by lp; every cut is violated by the current
// relaxation point and satisfied by every integer-feasible point.
std::vector<Cut> mir_cuts(const LinearModel& model, const LpEngine& lp, int max_cuts);

// A sealed copy of model with the cuts appended as >= rows.
LinearModel with_cuts(const LinearModel& model, const std::vector<Cut>& cuts);

}  // namespace rideshare::mip
