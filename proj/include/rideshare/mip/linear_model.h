#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rideshare::mip {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using VarId = int;
using RowId = int;

enum class Sense { less_equal, equal, greater_equal };

struct Variable {
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
  bool integer = false;
};

struct Term {
  VarId var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A maximization problem over bounded variables and linear rows. Mutable
// until seal(); afterwards only read access is allowed and the column-wise
// copy of the coefficient matrix is available.
class LinearModel {
 public:
  VarId add_variable(double lower, double upper, double objective,
                     bool integer);
  RowId add_constraint(std::vector<Term> terms, Sense sense, double rhs);

  // Validates the model, merges duplicate terms and builds the column-wise
  // matrix. Throws ModelError on an invalid model.
  void seal();
  [[nodiscard]] bool sealed() const { return sealed_; }

  [[nodiscard]] int num_variables() const {
    return static_cast<int>(variables_.size());
  }
  [[nodiscard]] int num_constraints() const {
    return static_cast<int>(constraints_.size());
  }
  [[nodiscard]] const Variable& variable(VarId j) const { return variables_[j]; }
  [[nodiscard]] const Constraint& constraint(RowId r) const {
    return constraints_[r];
  }
  [[nodiscard]] std::span<const Variable> variables() const { return variables_; }
  [[nodiscard]] std::span<const Constraint> constraints() const {
    return constraints_;
  }
  [[nodiscard]] int num_integer() const;

  // Column-wise matrix, valid after seal().
  [[nodiscard]] std::span<const std::int64_t> col_start() const { return col_start_; }
  [[nodiscard]] std::span<const std::int32_t> row_index() const { return row_index_; }
  [[nodiscard]] std::span<const double> col_value() const { return col_value_; }

  [[nodiscard]] double objective_value(std::span<const double> x) const;
  // Largest bound or row violation of x; zero for a feasible point.
  [[nodiscard]] double max_violation(std::span<const double> x) const;
  // Largest distance of an integer variable from the nearest integer.
  [[nodiscard]] double max_integrality_violation(std::span<const double> x) const;

 private:
  void require_mutable() const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  bool sealed_ = false;
  std::vector<std::int64_t> col_start_;
  std::vector<std::int32_t> row_index_;
  std::vector<double> col_value_;
};

struct SolverConfig {
  double feasibility_tol = 1e-7;
  double integrality_tol = 1e-6;
  std::int64_t node_limit = 100000;
  double time_limit_s = 30.0;
  // Nodes whose bound exceeds the incumbent by no more than
  // relative_gap * |incumbent| are pruned. Zero means proven optimality.
  double relative_gap = 0.0;
};

enum class SolveStatus { optimal, infeasible, unbounded, node_limit, solver_failure };

std::string to_string(SolveStatus status);

struct Solution {
  SolveStatus status = SolveStatus::solver_failure;
  std::vector<double> values;
  double objective = 0.0;
  // Best proven upper bound on the optimum; equals objective when optimal.
  double bound = 0.0;
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;

  // An optimal solution of a model without variables has no values.
  [[nodiscard]] bool has_values() const {
    return status == SolveStatus::optimal || !values.empty();
  }
};

}  // namespace rideshare::mip
