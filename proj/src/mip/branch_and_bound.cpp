#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "rideshare/mip/cuts.h"

#include "rideshare/mip/lp_engine.h"
#include "rideshare/mip/solver.h"

namespace rideshare::mip {

namespace {

using Clock = std::chrono::steady_clock;

Clock::time_point deadline_after(double seconds) {
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(seconds));
}

// The engine holds basics within tol; recomputing rows in another order and
// snapping integers can add a little on top.
bool acceptable(const LinearModel& model, std::span<const double> x, double tol) {
  return model.max_violation(x) <= tol * 100.0;
}

constexpr int kCutRounds = 20;
constexpr int kCutsPerRound = 400;

struct BoundChange {
  VarId var;
  double lower;
  double upper;
};

struct Node {
  double bound;
  std::int64_t seq;
  std::vector<BoundChange> changes;
  Basis basis;
  // The branching that created the node, for pseudocost updates.
  VarId branched = -1;
  bool up = false;
  double distance = 0.0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.seq > b.seq;
  }
};

// Most fractional integer variable, lowest id on ties; -1 when integral.
VarId branching_variable(std::span<const VarId> integers, const LpEngine& lp, double tol) {
  VarId best = -1;
  double best_dist = tol;
  for (const VarId j : integers) {
    const double v = lp.value(j);
    const double frac = v - std::floor(v);
    const double dist = std::min(frac, 1.0 - frac);
    if (dist > best_dist) {
      best_dist = dist;
      best = j;
    }
  }
  return best;
}

// Mean objective loss per unit of rounding, per variable and direction.
// Variables without history use the mean over all variables.
class Pseudocosts {
 public:
  explicit Pseudocosts(int n) {
    for (int d = 0; d < 2; ++d) {
      sum_[d].assign(n, 0.0);
      count_[d].assign(n, 0);
    }
  }

  void record(VarId j, bool up, double loss_per_unit) {
    const int d = up ? 1 : 0;
    sum_[d][j] += loss_per_unit;
    ++count_[d][j];
    total_sum_[d] += loss_per_unit;
    ++total_count_[d];
  }

  [[nodiscard]] double estimate(VarId j, bool up) const {
    const int d = up ? 1 : 0;
    if (count_[d][j] > 0) return sum_[d][j] / count_[d][j];
    if (total_count_[d] > 0) return total_sum_[d] / total_count_[d];
    return 1.0;
  }

 private:
  std::vector<double> sum_[2];
  std::vector<int> count_[2];
  double total_sum_[2] = {0.0, 0.0};
  std::int64_t total_count_[2] = {0, 0};
};

// Largest product of estimated down and up losses, lowest id on ties; -1
// when integral.
VarId pseudocost_variable(std::span<const VarId> integers, const LpEngine& lp, double tol,
                          const Pseudocosts& pc) {
  VarId best = -1;
  double best_score = -1.0;
  for (const VarId j : integers) {
    const double v = lp.value(j);
    const double frac = v - std::floor(v);
    if (std::min(frac, 1.0 - frac) <= tol) continue;
    const double down = std::max(pc.estimate(j, false) * frac, 1e-6);
    const double up = std::max(pc.estimate(j, true) * (1.0 - frac), 1e-6);
    const double score = down * up;
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

std::vector<double> snapped_values(const LinearModel& model, const LpEngine& lp) {
  auto values = lp.structural_values();
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).integer) values[j] = std::round(values[j]);
  }
  return values;
}

// Coefficient tightening on <= rows: an integer variable whose first unit
// away from its bound already makes the row redundant gets the smallest
// coefficient that keeps it so. Integer-feasible points are unchanged.
void tighten_row(std::vector<Term>& terms, double& rhs, std::span<const double> lower,
                 std::span<const double> upper, std::span<const Variable> vars) {
  double maxact = 0.0;
  for (const auto& t : terms) {
    const double b = t.coef > 0.0 ? upper[t.var] : lower[t.var];
    if (!std::isfinite(b)) return;
    maxact += t.coef * b;
  }
  for (auto& t : terms) {
    if (!vars[t.var].integer) continue;
    const double bound = t.coef > 0.0 ? upper[t.var] : lower[t.var];
    const double rest = maxact - t.coef * bound;
    // Complemented so that the variable moves away from its bound with a
    // negative coefficient.
    const double rhs_z = rhs - t.coef * bound;
    const double a_z = -std::abs(t.coef);
    if (rest <= rhs_z || rest + a_z > rhs_z) continue;
    const double tightened = rhs_z - rest;
    if (tightened <= a_z + 1e-9 * std::max(1.0, std::abs(a_z))) continue;
    t.coef = t.coef > 0.0 ? -tightened : tightened;
    rhs = rhs_z + t.coef * bound;
    maxact = rest + t.coef * bound;
  }
}

LinearModel strengthened(const LinearModel& model, std::span<const double> lower,
                         std::span<const double> upper) {
  LinearModel out;
  for (const auto& v : model.variables()) {
    out.add_variable(v.lower, v.upper, v.objective, v.integer);
  }
  for (const auto& c : model.constraints()) {
    auto terms = c.terms;
    double rhs = c.rhs;
    if (c.sense != Sense::equal) {
      const double sign = c.sense == Sense::less_equal ? 1.0 : -1.0;
      for (auto& t : terms) t.coef *= sign;
      rhs *= sign;
      tighten_row(terms, rhs, lower, upper, model.variables());
      for (auto& t : terms) t.coef *= sign;
      rhs *= sign;
    }
    out.add_constraint(std::move(terms), c.sense, rhs);
  }
  out.seal();
  return out;
}

}  // namespace

Solution solve_lp(const LinearModel& model, const SolverConfig& cfg) {
  if (!model.sealed()) throw ModelError("solve_lp requires a sealed model");
  LpEngine lp(model, cfg.feasibility_tol);
  lp.set_deadline(deadline_after(cfg.time_limit_s));
  Solution sol;
  const auto status = lp.solve();
  sol.lp_iterations = lp.iterations();
  switch (status) {
    case LpStatus::optimal:
      sol.values = lp.structural_values();
      sol.objective = model.objective_value(sol.values);
      sol.bound = sol.objective;
      sol.status = acceptable(model, sol.values, cfg.feasibility_tol)
                       ? SolveStatus::optimal
                       : SolveStatus::solver_failure;
      if (sol.status != SolveStatus::optimal) sol.values.clear();
      break;
    case LpStatus::infeasible: sol.status = SolveStatus::infeasible; break;
    case LpStatus::unbounded: sol.status = SolveStatus::unbounded; break;
    default: sol.status = SolveStatus::solver_failure; break;
  }
  return sol;
}

Solution solve_mip(const LinearModel& model, const SolverConfig& cfg) {
  if (!model.sealed()) throw ModelError("solve_mip requires a sealed model");
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    if (v.integer && !std::isfinite(v.upper)) {
      throw ModelError("integer variable " + std::to_string(j) + " needs a finite upper bound");
    }
  }
  const auto deadline = deadline_after(cfg.time_limit_s);
  const int n = model.num_variables();
  std::vector<double> base_lower(n), base_upper(n);
  for (int j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    base_lower[j] = v.integer ? std::ceil(v.lower - cfg.integrality_tol) : v.lower;
    base_upper[j] = v.integer ? std::floor(v.upper + cfg.integrality_tol) : v.upper;
  }
  std::vector<VarId> integers;
  for (int j = 0; j < n; ++j) {
    if (model.variable(j).integer) integers.push_back(j);
  }
  std::vector<std::unique_ptr<LinearModel>> models;
  models.push_back(std::make_unique<LinearModel>(strengthened(model, base_lower, base_upper)));
  auto make_engine = [&](const LinearModel& m) {
    auto engine = std::make_unique<LpEngine>(m, cfg.feasibility_tol);
    engine->set_deadline(deadline);
    for (int j = 0; j < n; ++j) engine->set_bounds(j, base_lower[j], base_upper[j]);
    return engine;
  };
  auto engine = make_engine(*models.back());

  Solution sol;
  sol.bound = kInfinity;
  const auto root = engine->solve();
  std::int64_t iterations = engine->iterations();
  if (root != LpStatus::optimal) {
    sol.lp_iterations = iterations;
    sol.nodes = 1;
    if (root == LpStatus::infeasible) {
      sol.status = SolveStatus::infeasible;
    } else if (root == LpStatus::unbounded) {
      sol.status = SolveStatus::unbounded;
    } else if (root == LpStatus::time_limit) {
      sol.status = SolveStatus::node_limit;
    } else {
      sol.status = SolveStatus::solver_failure;
    }
    return sol;
  }

  // Root cutting rounds; the tree is searched on the last model.
  for (int round = 0; round < kCutRounds; ++round) {
    if (branching_variable(integers, *engine, cfg.integrality_tol) < 0) break;
    auto cuts = mir_cuts(*models.back(), *engine, kCutsPerRound);
    if (cuts.empty()) cuts = gomory_cuts(*models.back(), *engine, kCutsPerRound, cfg.integrality_tol);
    if (cuts.empty()) break;
    const int rows = models.back()->num_constraints();
    auto next = std::make_unique<LinearModel>(with_cuts(*models.back(), cuts));
    auto next_engine = make_engine(*next);
    Basis basis = engine->basis();
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      basis.basic.push_back(n + rows + static_cast<int>(k));
    }
    next_engine->set_basis(basis);
    const auto status = next_engine->reoptimize();
    iterations += next_engine->iterations();
    if (status != LpStatus::optimal) break;
    const double before = engine->objective();
    const double after = next_engine->objective();
    models.push_back(std::move(next));
    engine = std::move(next_engine);
    if (before - after <= 1e-6 * (1.0 + std::abs(after))) break;
  }
  LpEngine& lp = *engine;
  const std::int64_t root_iterations = iterations - lp.iterations();

  double incumbent = -kInfinity;
  std::vector<double> best;
  bool have_incumbent = false;
  auto prune_level = [&]() {
    if (!have_incumbent) return -kInfinity;
    return incumbent + 1e-9 + 1e-12 * std::abs(incumbent) +
           cfg.relative_gap * std::abs(incumbent);
  };
  auto offer = [&](std::vector<double> values) {
    if (!acceptable(model, values, cfg.feasibility_tol)) return;
    if (model.max_integrality_violation(values) > cfg.integrality_tol) return;
    const double obj = model.objective_value(values);
    if (!have_incumbent || obj > incumbent) {
      have_incumbent = true;
      incumbent = obj;
      best = std::move(values);
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::int64_t seq = 0;
  std::int64_t nodes = 0;
  bool limit_hit = false;
  bool failure = false;

  Pseudocosts pseudocosts(n);
  std::vector<VarId> changed;
  auto apply = [&](const std::vector<BoundChange>& changes) {
    for (const VarId j : changed) lp.set_bounds(j, base_lower[j], base_upper[j]);
    changed.clear();
    for (const auto& c : changes) {
      lp.set_bounds(c.var, c.lower, c.upper);
      changed.push_back(c.var);
    }
  };

  // Fix integers at their rounded relaxation values and re-solve the rest.
  auto rounding_heuristic = [&](const std::vector<BoundChange>& changes, const Basis& basis) {
    std::vector<BoundChange> fixed = changes;
    for (const VarId j : integers) {
      const double r = std::clamp(std::round(lp.value(j)), lp.lower(j), lp.upper(j));
      fixed.push_back({j, r, r});
    }
    apply(fixed);
    lp.set_basis(basis);
    if (lp.reoptimize() == LpStatus::optimal) offer(snapped_values(model, lp));
  };

  // Evaluates the relaxation currently held by lp: records an incumbent or
  // creates children.
  auto expand = [&](const std::vector<BoundChange>& changes) {
    const double obj = lp.objective();
    if (obj <= prune_level()) return;
    const VarId var = pseudocost_variable(integers, lp, cfg.integrality_tol, pseudocosts);
    if (var < 0) {
      offer(snapped_values(model, lp));
      return;
    }
    const double v = lp.value(var);
    const double frac = v - std::floor(v);
    const Basis basis = lp.basis();
    Node down{obj, seq++, changes, basis, var, false, frac};
    down.changes.push_back({var, lp.lower(var), std::floor(v)});
    Node up{obj, seq++, changes, basis, var, true, 1.0 - frac};
    up.changes.push_back({var, std::ceil(v), lp.upper(var)});
    if (nodes == 1 || nodes % 64 == 0) rounding_heuristic(changes, basis);
    open.push(std::move(down));
    open.push(std::move(up));
  };

  nodes = 1;
  expand({});
  while (!open.empty()) {
    if (open.top().bound <= prune_level()) {
      while (!open.empty()) open.pop();
      break;
    }
    if (nodes >= cfg.node_limit || Clock::now() > deadline) {
      limit_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    ++nodes;
    apply(node.changes);
    lp.set_basis(node.basis);
    const auto status = lp.reoptimize();
    if (status == LpStatus::infeasible) continue;
    if (status == LpStatus::time_limit) {
      open.push(std::move(node));
      limit_hit = true;
      break;
    }
    if (status != LpStatus::optimal) {
      // Retry from scratch before giving up on the node.
      lp.reset_to_slack_basis();
      const auto retry = lp.solve();
      if (retry == LpStatus::infeasible) continue;
      if (retry != LpStatus::optimal) {
        failure = true;
        break;
      }
    }
    if (node.branched >= 0) {
      const double loss = std::max(0.0, node.bound - lp.objective());
      pseudocosts.record(node.branched, node.up, loss / node.distance);
    }
    expand(node.changes);
  }

  sol.nodes = nodes;
  sol.lp_iterations = root_iterations + lp.iterations();
  double open_bound = -kInfinity;
  if (!open.empty()) open_bound = open.top().bound;
  if (have_incumbent) {
    sol.values = best;
    sol.objective = incumbent;
    sol.bound = std::max(incumbent, open_bound);
  } else {
    sol.bound = open_bound;
  }
  if (failure) {
    sol.status = !have_incumbent ? SolveStatus::solver_failure : SolveStatus::node_limit;
  } else if (limit_hit) {
    sol.status = SolveStatus::node_limit;
  } else {
    sol.status = !have_incumbent ? SolveStatus::infeasible : SolveStatus::optimal;
  }
  return sol;
}

}  // namespace rideshare::mip
