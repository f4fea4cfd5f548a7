#include "rideshare/mip/linear_model.h"

#include <algorithm>
#include <cmath>

namespace rideshare::mip {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::node_limit: return "node-limit";
    case SolveStatus::solver_failure: return "solver-failure";
  }
  return "unknown";
}

void LinearModel::require_mutable() const {
  if (sealed_) throw ModelError("model is sealed");
}

VarId LinearModel::add_variable(double lower, double upper, double objective,
                                bool integer) {
  require_mutable();
  variables_.push_back({lower, upper, objective, integer});
  return static_cast<VarId>(variables_.size() - 1);
}

RowId LinearModel::add_constraint(std::vector<Term> terms, Sense sense,
                                  double rhs) {
  require_mutable();
  constraints_.push_back({std::move(terms), sense, rhs});
  return static_cast<RowId>(constraints_.size() - 1);
}

int LinearModel::num_integer() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                        [](const Variable& v) { return v.integer; }));
}

void LinearModel::seal() {
  if (sealed_) return;
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    const auto& v = variables_[j];
    if (!std::isfinite(v.lower)) {
      throw ModelError("variable " + std::to_string(j) + " has no finite lower bound");
    }
    if (std::isnan(v.upper) || v.upper == -kInfinity || v.upper < v.lower) {
      throw ModelError("variable " + std::to_string(j) + " has an empty domain");
    }
    if (!std::isfinite(v.objective)) {
      throw ModelError("variable " + std::to_string(j) + " has a non-finite objective");
    }
  }
  std::vector<std::int64_t> counts(n + 1, 0);
  for (std::size_t r = 0; r < constraints_.size(); ++r) {
    auto& c = constraints_[r];
    if (!std::isfinite(c.rhs)) {
      throw ModelError("row " + std::to_string(r) + " has a non-finite rhs");
    }
    for (const auto& t : c.terms) {
      if (t.var < 0 || t.var >= n) {
        throw ModelError("row " + std::to_string(r) + " references undeclared variable " +
                         std::to_string(t.var));
      }
      if (!std::isfinite(t.coef)) {
        throw ModelError("row " + std::to_string(r) + " has a non-finite coefficient");
      }
    }
    std::sort(c.terms.begin(), c.terms.end(),
              [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    merged.reserve(c.terms.size());
    for (const auto& t : c.terms) {
      if (!merged.empty() && merged.back().var == t.var) {
        merged.back().coef += t.coef;
      } else {
        merged.push_back(t);
      }
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    c.terms = std::move(merged);
    for (const auto& t : c.terms) ++counts[t.var + 1];
  }
  col_start_.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) col_start_[j + 1] = col_start_[j] + counts[j + 1];
  row_index_.resize(col_start_[n]);
  col_value_.resize(col_start_[n]);
  std::vector<std::int64_t> fill(col_start_.begin(), col_start_.end() - 1);
  for (std::size_t r = 0; r < constraints_.size(); ++r) {
    for (const auto& t : constraints_[r].terms) {
      const auto pos = fill[t.var]++;
      row_index_[pos] = static_cast<std::int32_t>(r);
      col_value_[pos] = t.coef;
    }
  }
  sealed_ = true;
}

double LinearModel::objective_value(std::span<const double> x) const {
  double obj = 0.0;
  for (int j = 0; j < num_variables(); ++j) obj += variables_[j].objective * x[j];
  return obj;
}

double LinearModel::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, variables_[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables_[j].upper);
  }
  for (const auto& c : constraints_) {
    double activity = 0.0;
    for (const auto& t : c.terms) activity += t.coef * x[t.var];
    switch (c.sense) {
      case Sense::less_equal: worst = std::max(worst, activity - c.rhs); break;
      case Sense::greater_equal: worst = std::max(worst, c.rhs - activity); break;
      case Sense::equal: worst = std::max(worst, std::abs(activity - c.rhs)); break;
    }
  }
  return worst;
}

double LinearModel::max_integrality_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    if (variables_[j].integer) {
      worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
  }
  return worst;
}

}  // namespace rideshare::mip
