#include <cmath>

#include "rideshare/mip/lp_engine.h"
#include "rideshare/mip/solver.h"

namespace rideshare::mip {

namespace {

struct Enumerator {
  const LinearModel& model;
  const SolverConfig& cfg;
  LpEngine lp;
  std::vector<VarId> integers;
  std::vector<double> lower, upper;  // current domains, narrowed as integers are fixed
  Solution best;
  bool found = false;
  bool unbounded = false;

  // Interval check of every row given the current domains.
  bool rows_possible() const {
    for (const auto& c : model.constraints()) {
      double lo = 0.0, hi = 0.0;
      for (const auto& t : c.terms) {
        if (t.coef > 0) {
          lo += t.coef * lower[t.var];
          hi += t.coef * upper[t.var];
        } else {
          lo += t.coef * upper[t.var];
          hi += t.coef * lower[t.var];
        }
      }
      const double slack = cfg.feasibility_tol * (1.0 + std::abs(c.rhs));
      if (c.sense != Sense::greater_equal && lo > c.rhs + slack) return false;
      if (c.sense != Sense::less_equal && hi < c.rhs - slack) return false;
    }
    return true;
  }

  void leaf() {
    for (const VarId j : integers) lp.set_bounds(j, lower[j], upper[j]);
    lp.reset_to_slack_basis();
    const auto status = lp.solve();
    if (status == LpStatus::infeasible) return;
    if (status == LpStatus::unbounded) {
      unbounded = true;
      return;
    }
    if (status != LpStatus::optimal) {
      throw std::runtime_error("brute force: residual LP failed");
    }
    auto values = lp.structural_values();
    for (const VarId j : integers) values[j] = lower[j];
    const double obj = model.objective_value(values);
    if (!found || obj > best.objective) {
      found = true;
      best.objective = obj;
      best.values = std::move(values);
    }
  }

  void descend(std::size_t k) {
    if (unbounded || !rows_possible()) return;
    if (k == integers.size()) {
      ++best.nodes;
      leaf();
      return;
    }
    const VarId j = integers[k];
    const double lo = lower[j], hi = upper[j];
    for (double v = lo; v <= hi; v += 1.0) {
      lower[j] = upper[j] = v;
      descend(k + 1);
    }
    lower[j] = lo;
    upper[j] = hi;
  }
};

}  // namespace

Solution brute_force_solve(const LinearModel& model, std::int64_t max_enum,
                           const SolverConfig& cfg) {
  if (!model.sealed()) throw ModelError("brute_force_solve requires a sealed model");
  Enumerator e{model, cfg, LpEngine(model, cfg.feasibility_tol), {}, {}, {}, {}, false, false};
  double combos = 1.0;
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    e.lower.push_back(v.lower);
    e.upper.push_back(v.upper);
    if (!v.integer) continue;
    if (!std::isfinite(v.upper)) {
      throw EnumerationLimitError("integer variable " + std::to_string(j) + " is unbounded");
    }
    e.lower[j] = std::ceil(v.lower);
    e.upper[j] = std::floor(v.upper);
    combos *= std::max(0.0, e.upper[j] - e.lower[j] + 1.0);
    e.integers.push_back(j);
  }
  if (combos > static_cast<double>(max_enum)) {
    throw EnumerationLimitError("enumeration needs " + std::to_string(combos) +
                                " assignments, budget is " + std::to_string(max_enum));
  }
  e.descend(0);
  Solution sol = std::move(e.best);
  if (e.unbounded) {
    sol.status = SolveStatus::unbounded;
    sol.values.clear();
  } else {
    sol.status = e.found ? SolveStatus::optimal : SolveStatus::infeasible;
  }
  sol.bound = sol.objective;
  sol.lp_iterations = e.lp.iterations();
  return sol;
}

}  // namespace rideshare::mip
