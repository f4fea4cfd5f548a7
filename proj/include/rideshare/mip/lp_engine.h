#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rideshare/kernels/kernels.h"
#include "rideshare/mip/linear_model.h"

namespace rideshare::mip {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, time_limit, numerical_failure };

// Which variables are basic, and which nonbasic variables rest at their upper
// bound. Variables n..n+m-1 are the row logicals.
struct Basis {
  std::vector<int> basic;
  std::vector<int> at_upper;
};

// Bounded revised simplex over the rows of a sealed LinearModel.
//
// Rows are turned into equalities a.x + s = b with one logical s per row whose
// bounds encode the sense. The basis inverse is kept in product form: a
// reinversion builds eta vectors from the identity, every pivot appends one,
// and the file is rebuilt every kRefactorInterval pivots.
//
// Pricing works on an active subset of the structural columns. When no active
// column can enter, one pass over all columns either proves optimality or
// brings the most attractive candidates into the active set, so wide models
// with few useful columns stay cheap per iteration.
//
// Primal simplex (phase 1 on the sum of infeasibilities, then phase 2) solves
// from any basis. Dual simplex re-optimizes after bound changes, which is how
// branch-and-bound uses it, and hands over to the primal simplex for the
// final pricing pass. After kStallLimit pivots without progress the primal
// switches to Bland's rule over all columns until a step makes progress.
class LpEngine {
 public:
  using Clock = std::chrono::steady_clock;

  LpEngine(const LinearModel& model, double feasibility_tol);

  void set_bounds(VarId j, double lower, double upper);
  void restore_bounds();
  [[nodiscard]] double lower(VarId j) const { return lb_[j]; }
  [[nodiscard]] double upper(VarId j) const { return ub_[j]; }

  // Primal simplex from the current basis.
  LpStatus solve();
  // Dual simplex from the current basis; falls back to primal simplex when
  // the basis is not dual feasible or the dual iteration stalls.
  LpStatus reoptimize();

  [[nodiscard]] Basis basis() const;
  void set_basis(const Basis& basis);
  void reset_to_slack_basis();

  void set_deadline(std::optional<Clock::time_point> deadline) { deadline_ = deadline; }

  // In the model's (maximization) sense.
  [[nodiscard]] double objective() const;
  [[nodiscard]] std::vector<double> structural_values() const;
  [[nodiscard]] double value(VarId j) const { return x_[j]; }
  // Reduced costs of all structural columns in the maximization sense: the
  // rate at which the objective changes as nonbasic j moves up.
  [[nodiscard]] std::vector<double> reduced_costs();
  [[nodiscard]] bool at_lower(VarId j) const { return status_[j] == kLower; }
  [[nodiscard]] bool at_upper(int j) const { return status_[j] == kUpper; }
  [[nodiscard]] bool is_basic(int j) const { return status_[j] == kBasic; }
  [[nodiscard]] int basic_variable(int row) const { return basic_[row]; }
  // Row `row` of B^-1 [A I]: entries for the n structurals, then the m
  // logicals. The basic variable at that row equals its current value minus
  // the sum of entry * (x_j - current x_j) over nonbasic j.
  [[nodiscard]] std::vector<double> tableau_row(int row);
  [[nodiscard]] std::int64_t iterations() const { return iterations_; }
  [[nodiscard]] int num_rows() const { return m_; }
  [[nodiscard]] int num_structural() const { return n_; }
  [[nodiscard]] int num_active() const { return static_cast<int>(active_vars_.size()); }

  static constexpr int kRefactorInterval = 96;
  static constexpr int kStallLimit = 64;

 private:
  enum : std::int8_t { kBasic = 0, kLower = 1, kUpper = 2 };

  struct EtaFile {
    std::vector<int> pivot_row;
    std::vector<double> pivot_value;
    std::vector<std::int64_t> start{0};
    std::vector<int> index;
    std::vector<double> value;
    void clear() {
      pivot_row.clear();
      pivot_value.clear();
      start.assign(1, 0);
      index.clear();
      value.clear();
    }
    [[nodiscard]] int size() const { return static_cast<int>(pivot_row.size()); }
    void push(int row, std::span<const double> column, std::span<const int> nonzeros);
  };

  // Column j of [A I] scattered into a dense vector.
  void load_column(int j, std::vector<double>& dense) const;
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  bool refactor();
  void compute_basic_values();
  void compute_duals(bool phase_one);
  void price_active();
  void price_all();
  void activate(int j);
  void set_direction(int j, double dir);
  void refresh_directions();
  double nonbasic_value(int j) const;
  double infeasibility(int j) const;
  double total_infeasibility() const;
  int choose_entering(bool bland);
  void compute_pivot_row(int row);
  bool activate_dual_candidates(bool below);
  void pivot(int entering, int leaving_row, double leaving_value, std::int8_t leaving_status);
  void load_entering_column(int q);
  bool out_of_time();
  LpStatus primal();
  LpStatus dual();
  bool dual_feasible() const;
  double cost_value() const;

  const LinearModel& model_;
  int n_ = 0;
  int m_ = 0;
  double primal_tol_;
  double dual_tol_ = 1e-7;
  double pivot_tol_ = 1e-9;

  std::vector<double> rhs_;
  std::vector<double> cost_;
  std::vector<double> model_lb_, model_ub_;
  std::vector<double> lb_, ub_;
  const kernels::KernelTable& kernels_;

  // All structural columns.
  kernels::BlockedEll ell_;
  std::vector<int> long_columns_;
  std::vector<double> d_full_;
  std::vector<double> dir_full_;
  std::vector<double> prow_full_;

  // Active structural columns, in activation order.
  std::vector<int> active_vars_;
  std::vector<int> active_pos_;
  kernels::BlockedEll act_ell_;
  std::vector<int> act_long_;
  std::vector<double> act_cost_;
  std::vector<double> d_act_;
  std::vector<double> dir_act_;
  std::vector<double> prow_act_;
  int activation_batch_ = 0;

  // Logicals.
  std::vector<double> d_log_;
  std::vector<double> dir_log_;
  std::vector<double> prow_log_;

  std::vector<std::int8_t> status_;
  std::vector<int> basic_;     // variable at each row position
  std::vector<int> position_;  // row position of a basic variable, -1 otherwise
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> work_;
  std::vector<double> column_;
  std::vector<int> column_nz_;
  EtaFile etas_;
  bool phase_one_ = false;
  int updates_since_refactor_ = 0;
  std::int64_t iterations_ = 0;
  std::optional<Clock::time_point> deadline_;
};

}  // namespace rideshare::mip
