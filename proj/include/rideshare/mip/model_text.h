#pragma once

#include <iosfwd>
#include <string>

#include "rideshare/mip/linear_model.h"

namespace rideshare::mip {

// Plain-text instance format:
//   var <id> <lb> <ub> <int|cont> <obj>
//   row <le|eq|ge> <rhs> <id>:<coef> ...
// Numbers round-trip exactly; an infinite upper bound is written as inf.
void write_model(std::ostream& out, const LinearModel& model);
std::string model_to_string(const LinearModel& model);

// Returns a sealed model. Throws ModelError with the line number on bad input.
LinearModel read_model(std::istream& in);

}  // namespace rideshare::mip
