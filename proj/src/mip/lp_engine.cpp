#include "rideshare/mip/lp_engine.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace rideshare::mip {

namespace {

constexpr int kMaxEllWidth = 8;

}  // namespace

void LpEngine::EtaFile::push(int row, std::span<const double> column,
                             std::span<const int> nonzeros) {
  const double pivot = column[row];
  pivot_row.push_back(row);
  pivot_value.push_back(1.0 / pivot);
  for (const int i : nonzeros) {
    if (i == row || column[i] == 0.0) continue;
    index.push_back(i);
    value.push_back(-column[i] / pivot);
  }
  start.push_back(static_cast<std::int64_t>(index.size()));
}

LpEngine::LpEngine(const LinearModel& model, double feasibility_tol)
    : model_(model), primal_tol_(feasibility_tol), kernels_(kernels::active()) {
  if (!model.sealed()) throw ModelError("LP engine requires a sealed model");
  n_ = model.num_variables();
  m_ = model.num_constraints();
  const int total = n_ + m_;
  cost_.assign(total, 0.0);
  model_lb_.assign(total, 0.0);
  model_ub_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) {
    const auto& v = model.variable(j);
    cost_[j] = -v.objective;
    model_lb_[j] = v.lower;
    model_ub_[j] = v.upper;
  }
  rhs_.resize(m_);
  for (int r = 0; r < m_; ++r) {
    const auto& c = model.constraint(r);
    rhs_[r] = c.rhs;
    switch (c.sense) {
      case Sense::less_equal:
        model_lb_[n_ + r] = 0.0;
        model_ub_[n_ + r] = kInfinity;
        break;
      case Sense::greater_equal:
        model_lb_[n_ + r] = -kInfinity;
        model_ub_[n_ + r] = 0.0;
        break;
      case Sense::equal:
        model_lb_[n_ + r] = 0.0;
        model_ub_[n_ + r] = 0.0;
        break;
    }
  }
  lb_ = model_lb_;
  ub_ = model_ub_;

  const auto cs = model.col_start();
  const auto ri = model.row_index();
  // Wide enough for 99% of the columns; the rest are priced separately.
  std::vector<int> by_length(kMaxEllWidth + 2, 0);
  for (int j = 0; j < n_; ++j) {
    ++by_length[std::min<std::int64_t>(cs[j + 1] - cs[j], kMaxEllWidth + 1)];
  }
  int width = 1;
  for (int covered = by_length[0] + by_length[1]; width < kMaxEllWidth && covered < n_ - n_ / 100;
       covered += by_length[++width]) {
  }
  for (int j = 0; j < n_; ++j) {
    if (cs[j + 1] - cs[j] > width) long_columns_.push_back(j);
  }
  ell_ = kernels::make_blocked_ell(n_, width, cs, ri, model.col_value());
  const auto padded = static_cast<std::size_t>(ell_.padded_columns());
  d_full_.assign(padded, 0.0);
  dir_full_.assign(padded, 0.0);
  prow_full_.assign(padded, 0.0);
  act_ell_.width = width;
  active_pos_.assign(n_, -1);
  activation_batch_ = std::max(1000, 2 * m_);
  d_log_.assign(m_, 0.0);
  dir_log_.assign(m_, 0.0);
  prow_log_.assign(m_, 0.0);

  status_.assign(total, kLower);
  position_.assign(total, -1);
  x_.assign(total, 0.0);
  // Padded ELL slots read row 0, so keep at least one entry.
  y_.assign(std::max(m_, 1), 0.0);
  work_.assign(std::max(m_, 1), 0.0);
  column_.assign(m_, 0.0);
  reset_to_slack_basis();
  if (n_ <= activation_batch_) {
    for (int j = 0; j < n_; ++j) activate(j);
  }
}

void LpEngine::set_bounds(VarId j, double lower, double upper) {
  lb_[j] = lower;
  ub_[j] = upper;
  if (status_[j] != kBasic) {
    if (status_[j] == kUpper && !std::isfinite(upper)) status_[j] = kLower;
    if (status_[j] == kLower && !std::isfinite(lower)) status_[j] = kUpper;
    x_[j] = nonbasic_value(j);
    set_direction(j, upper > lower ? (status_[j] == kLower ? 1.0 : -1.0) : 0.0);
  }
}

void LpEngine::restore_bounds() {
  for (int j = 0; j < n_; ++j) set_bounds(j, model_lb_[j], model_ub_[j]);
}

double LpEngine::nonbasic_value(int j) const {
  return status_[j] == kUpper ? ub_[j] : lb_[j];
}

void LpEngine::reset_to_slack_basis() {
  basic_.resize(m_);
  std::fill(position_.begin(), position_.end(), -1);
  for (int j = 0; j < n_; ++j) {
    status_[j] = std::isfinite(lb_[j]) ? kLower : kUpper;
  }
  for (int r = 0; r < m_; ++r) {
    basic_[r] = n_ + r;
    status_[n_ + r] = kBasic;
    position_[n_ + r] = r;
  }
  refactor();
  refresh_directions();
  compute_basic_values();
}

Basis LpEngine::basis() const {
  Basis b;
  b.basic = basic_;
  std::sort(b.basic.begin(), b.basic.end());
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kUpper) b.at_upper.push_back(j);
  }
  return b;
}

void LpEngine::set_basis(const Basis& b) {
  if (static_cast<int>(b.basic.size()) != m_) {
    reset_to_slack_basis();
    return;
  }
  for (int j = 0; j < n_ + m_; ++j) {
    status_[j] = std::isfinite(lb_[j]) ? kLower : kUpper;
    position_[j] = -1;
  }
  for (const int j : b.at_upper) {
    if (!std::isfinite(ub_[j])) continue;
    status_[j] = kUpper;
    if (j < n_) activate(j);
  }
  for (int r = 0; r < m_; ++r) {
    const int j = b.basic[r];
    basic_[r] = j;
    status_[j] = kBasic;
    position_[j] = r;
    if (j < n_) activate(j);
  }
  refactor();
  refresh_directions();
  compute_basic_values();
}

void LpEngine::load_column(int j, std::vector<double>& dense) const {
  if (j >= n_) {
    dense[j - n_] = 1.0;
    return;
  }
  const auto cs = model_.col_start();
  const auto ri = model_.row_index();
  const auto cv = model_.col_value();
  for (auto k = cs[j]; k < cs[j + 1]; ++k) dense[ri[k]] = cv[k];
}

void LpEngine::ftran(std::vector<double>& v) const {
  const int count = etas_.size();
  for (int k = 0; k < count; ++k) {
    const int r = etas_.pivot_row[k];
    const double vr = v[r];
    if (vr == 0.0) continue;
    v[r] = vr * etas_.pivot_value[k];
    for (auto p = etas_.start[k]; p < etas_.start[k + 1]; ++p) {
      v[etas_.index[p]] += etas_.value[p] * vr;
    }
  }
}

void LpEngine::btran(std::vector<double>& v) const {
  for (int k = etas_.size() - 1; k >= 0; --k) {
    const int r = etas_.pivot_row[k];
    double acc = v[r] * etas_.pivot_value[k];
    for (auto p = etas_.start[k]; p < etas_.start[k + 1]; ++p) {
      acc += etas_.value[p] * v[etas_.index[p]];
    }
    v[r] = acc;
  }
}

bool LpEngine::refactor() {
  etas_.clear();
  updates_since_refactor_ = 0;
  std::vector<char> row_taken(m_, 0);
  std::vector<int> new_basic(m_, -1);
  std::vector<int> structural;
  for (int r = 0; r < m_; ++r) {
    const int v = basic_[r];
    if (v >= n_) {
      row_taken[v - n_] = 1;
      new_basic[v - n_] = v;
    } else {
      structural.push_back(v);
    }
  }
  std::sort(structural.begin(), structural.end());

  const auto cs = model_.col_start();
  const auto ri = model_.row_index();
  const int ns = static_cast<int>(structural.size());
  // Basic structurals by row.
  std::vector<int> by_row_start(m_ + 1, 0);
  for (const int v : structural) {
    for (auto p = cs[v]; p < cs[v + 1]; ++p) ++by_row_start[ri[p] + 1];
  }
  for (int r = 0; r < m_; ++r) by_row_start[r + 1] += by_row_start[r];
  std::vector<int> by_row(by_row_start[m_]);
  {
    std::vector<int> fill(by_row_start.begin(), by_row_start.end() - 1);
    for (int k = 0; k < ns; ++k) {
      const int v = structural[k];
      for (auto p = cs[v]; p < cs[v + 1]; ++p) by_row[fill[ri[p]]++] = k;
    }
  }
  std::vector<int> count(ns, 0);
  std::vector<int> row_count(m_, 0);
  std::vector<char> done(ns, 0);
  for (int k = 0; k < ns; ++k) {
    const int v = structural[k];
    for (auto p = cs[v]; p < cs[v + 1]; ++p) {
      if (!row_taken[ri[p]]) {
        ++count[k];
        ++row_count[ri[p]];
      }
    }
  }
  // Columns with the fewest open rows go first; singletons pivot without fill.
  using Entry = std::pair<int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (int k = 0; k < ns; ++k) heap.emplace(count[k], k);

  std::vector<int> rejected;
  std::vector<int> nz;
  while (!heap.empty()) {
    const auto [c, k] = heap.top();
    heap.pop();
    if (done[k]) continue;
    if (c != count[k]) {
      heap.emplace(count[k], k);
      continue;
    }
    done[k] = 1;
    const int v = structural[k];
    for (auto p = cs[v]; p < cs[v + 1]; ++p) {
      if (!row_taken[ri[p]]) --row_count[ri[p]];
    }
    std::fill(column_.begin(), column_.end(), 0.0);
    load_column(v, column_);
    ftran(column_);
    double max_abs = 0.0;
    nz.clear();
    for (int i = 0; i < m_; ++i) {
      if (column_[i] == 0.0) continue;
      nz.push_back(i);
      if (!row_taken[i]) max_abs = std::max(max_abs, std::abs(column_[i]));
    }
    if (max_abs < 1e-9) {
      rejected.push_back(v);
      continue;
    }
    const double threshold = 0.1 * max_abs;
    int best = -1;
    for (const int i : nz) {
      if (row_taken[i] || std::abs(column_[i]) < threshold) continue;
      if (best < 0 || row_count[i] < row_count[best]) best = i;
    }
    etas_.push(best, column_, nz);
    row_taken[best] = 1;
    new_basic[best] = v;
    for (int p = by_row_start[best]; p < by_row_start[best + 1]; ++p) {
      const int s = by_row[p];
      if (!done[s]) {
        --count[s];
        heap.emplace(count[s], s);
      }
    }
  }
  std::fill(column_.begin(), column_.end(), 0.0);

  // Singular leftovers give way to the logicals of the uncovered rows.
  for (const int v : rejected) {
    status_[v] = std::isfinite(lb_[v]) ? kLower : kUpper;
    position_[v] = -1;
    x_[v] = nonbasic_value(v);
    set_direction(v, ub_[v] > lb_[v] ? (status_[v] == kLower ? 1.0 : -1.0) : 0.0);
  }
  for (int r = 0; r < m_; ++r) {
    if (new_basic[r] < 0) {
      new_basic[r] = n_ + r;
      status_[n_ + r] = kBasic;
      set_direction(n_ + r, 0.0);
    }
    basic_[r] = new_basic[r];
    position_[basic_[r]] = r;
  }
  return rejected.empty();
}

void LpEngine::compute_basic_values() {
  std::copy(rhs_.begin(), rhs_.end(), work_.begin());
  const auto cs = model_.col_start();
  const auto ri = model_.row_index();
  const auto cv = model_.col_value();
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kBasic) continue;
    const double xj = nonbasic_value(j);
    x_[j] = xj;
    if (xj == 0.0) continue;
    if (j >= n_) {
      work_[j - n_] -= xj;
    } else {
      for (auto p = cs[j]; p < cs[j + 1]; ++p) work_[ri[p]] -= cv[p] * xj;
    }
  }
  ftran(work_);
  for (int r = 0; r < m_; ++r) x_[basic_[r]] = work_[r];
}

double LpEngine::infeasibility(int j) const {
  if (x_[j] < lb_[j] - primal_tol_) return lb_[j] - x_[j];
  if (x_[j] > ub_[j] + primal_tol_) return x_[j] - ub_[j];
  return 0.0;
}

double LpEngine::total_infeasibility() const {
  double sum = 0.0;
  for (int r = 0; r < m_; ++r) sum += infeasibility(basic_[r]);
  return sum;
}

double LpEngine::cost_value() const {
  double c = 0.0;
  for (int j = 0; j < n_; ++j) c += cost_[j] * x_[j];
  return c;
}

void LpEngine::compute_duals(bool phase_one) {
  for (int r = 0; r < m_; ++r) {
    const int b = basic_[r];
    if (phase_one) {
      if (x_[b] < lb_[b] - primal_tol_) {
        y_[r] = -1.0;
      } else if (x_[b] > ub_[b] + primal_tol_) {
        y_[r] = 1.0;
      } else {
        y_[r] = 0.0;
      }
    } else {
      y_[r] = cost_[b];
    }
  }
  btran(y_);
}


void LpEngine::activate(int j) {
  if (active_pos_[j] >= 0) return;
  const int pos = num_active();
  active_vars_.push_back(j);
  active_pos_[j] = pos;
  const auto cs = model_.col_start();
  const auto begin = static_cast<std::size_t>(cs[j]);
  const auto nnz = static_cast<std::size_t>(cs[j + 1] - cs[j]);
  kernels::append_column(act_ell_, model_.row_index().subspan(begin, nnz),
                         model_.col_value().subspan(begin, nnz));
  if (static_cast<int>(nnz) > act_ell_.width) act_long_.push_back(pos);
  const auto padded = static_cast<std::size_t>(act_ell_.padded_columns());
  if (d_act_.size() < padded) {
    act_cost_.resize(padded, 0.0);
    d_act_.resize(padded, 0.0);
    dir_act_.resize(padded, 0.0);
    prow_act_.resize(padded, 0.0);
  }
  act_cost_[pos] = cost_[j];
  dir_act_[pos] = dir_full_[j];
}

void LpEngine::set_direction(int j, double dir) {
  if (j >= n_) {
    dir_log_[j - n_] = dir;
    return;
  }
  dir_full_[j] = dir;
  if (active_pos_[j] >= 0) dir_act_[active_pos_[j]] = dir;
}

void LpEngine::refresh_directions() {
  for (int j = 0; j < n_ + m_; ++j) {
    double dir = 0.0;
    if (status_[j] != kBasic && ub_[j] > lb_[j]) dir = status_[j] == kLower ? 1.0 : -1.0;
    set_direction(j, dir);
  }
}

void LpEngine::price_active() {
  kernels_.column_dots(act_ell_, 0, num_active(), y_.data(),
                       phase_one_ ? nullptr : act_cost_.data(), d_act_.data());
  if (!act_long_.empty()) {
    const auto cs = model_.col_start();
    const auto ri = model_.row_index();
    const auto cv = model_.col_value();
    for (const int pos : act_long_) {
      const int j = active_vars_[pos];
      double acc = 0.0;
      for (auto p = cs[j]; p < cs[j + 1]; ++p) acc += y_[ri[p]] * cv[p];
      d_act_[pos] = (phase_one_ ? 0.0 : cost_[j]) - acc;
    }
  }
  for (int r = 0; r < m_; ++r) d_log_[r] = -y_[r];
}

void LpEngine::price_all() {
  kernels_.column_dots(ell_, 0, n_, y_.data(), phase_one_ ? nullptr : cost_.data(),
                       d_full_.data());
  if (long_columns_.empty()) return;
  const auto cs = model_.col_start();
  const auto ri = model_.row_index();
  const auto cv = model_.col_value();
  for (const int j : long_columns_) {
    double acc = 0.0;
    for (auto p = cs[j]; p < cs[j + 1]; ++p) acc += y_[ri[p]] * cv[p];
    d_full_[j] = (phase_one_ ? 0.0 : cost_[j]) - acc;
  }
}

int LpEngine::choose_entering(bool bland) {
  price_active();
  if (bland) {
    price_all();
    for (int j = 0; j < n_; ++j) {
      if (-(dir_full_[j] * d_full_[j]) > dual_tol_) {
        activate(j);
        return j;
      }
    }
    for (int r = 0; r < m_; ++r) {
      if (-(dir_log_[r] * d_log_[r]) > dual_tol_) return n_ + r;
    }
    return -1;
  }
  const int count = num_active();
  const auto structural = kernels_.dantzig_select(
      std::span<const double>(d_act_).first(count),
      std::span<const double>(dir_act_).first(count), dual_tol_, 0);
  const auto logical = kernels_.dantzig_select(d_log_, dir_log_, dual_tol_, 0);
  if (structural.index >= 0 && (logical.index < 0 || structural.score >= logical.score)) {
    return active_vars_[structural.index];
  }
  if (logical.index >= 0) return n_ + logical.index;

  // The active set prices out: scan every column and widen the set.
  price_all();
  std::vector<std::pair<double, int>> found;
  for (int j = 0; j < n_; ++j) {
    if (active_pos_[j] >= 0) continue;
    const double score = -(dir_full_[j] * d_full_[j]);
    if (score > dual_tol_) found.emplace_back(-score, j);
  }
  if (found.empty()) return -1;
  const auto keep = std::min(found.size(), static_cast<std::size_t>(activation_batch_));
  std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(keep),
                    found.end());
  for (std::size_t k = 0; k < keep; ++k) activate(found[k].second);
  return found[0].second;
}

void LpEngine::load_entering_column(int q) {
  std::fill(column_.begin(), column_.end(), 0.0);
  load_column(q, column_);
  ftran(column_);
  column_nz_.clear();
  for (int i = 0; i < m_; ++i) {
    if (std::abs(column_[i]) > 1e-12) {
      column_nz_.push_back(i);
    } else {
      column_[i] = 0.0;
    }
  }
}

void LpEngine::pivot(int entering, int leaving_row, double leaving_value,
                     std::int8_t leaving_status) {
  const int leaving = basic_[leaving_row];
  etas_.push(leaving_row, column_, column_nz_);
  x_[leaving] = leaving_value;
  status_[leaving] = leaving_status;
  position_[leaving] = -1;
  basic_[leaving_row] = entering;
  status_[entering] = kBasic;
  position_[entering] = leaving_row;
  if (leaving < n_) activate(leaving);
  set_direction(entering, 0.0);
  set_direction(leaving, ub_[leaving] > lb_[leaving]
                             ? (leaving_status == kLower ? 1.0 : -1.0)
                             : 0.0);
  ++updates_since_refactor_;
}

bool LpEngine::out_of_time() {
  return deadline_.has_value() && (iterations_ & 31) == 0 && Clock::now() > *deadline_;
}

LpStatus LpEngine::solve() {
  refresh_directions();
  compute_basic_values();
  return primal();
}

LpStatus LpEngine::primal() {
  const std::int64_t limit = iterations_ + 50LL * (n_ + m_) + 10000;
  bool bland = false;
  int stall = 0;
  int verify_rounds = 0;
  while (true) {
    if (iterations_ > limit) return LpStatus::iteration_limit;
    if (out_of_time()) return LpStatus::time_limit;
    if (updates_since_refactor_ >= kRefactorInterval) {
      refactor();
      compute_basic_values();
    }
    const bool phase_one = total_infeasibility() > 0.0;
    if (phase_one != phase_one_) {
      phase_one_ = phase_one;
      stall = 0;
      bland = false;
    }
    compute_duals(phase_one_);
    const int q = choose_entering(bland);
    if (q < 0) {
      // Confirm on a fresh factorization before reporting.
      if (updates_since_refactor_ > 0 && verify_rounds++ < 3) {
        refactor();
        compute_basic_values();
        continue;
      }
      return phase_one_ ? LpStatus::infeasible : LpStatus::optimal;
    }
    ++iterations_;
    const double dir = q < n_ ? dir_full_[q] : dir_log_[q - n_];
    load_entering_column(q);

    auto range = [&](int b) -> std::pair<double, double> {
      if (phase_one_) {
        if (x_[b] < lb_[b] - primal_tol_) return {-kInfinity, lb_[b]};
        if (x_[b] > ub_[b] + primal_tol_) return {ub_[b], kInfinity};
      }
      return {lb_[b], ub_[b]};
    };

    // Two-pass (Harris) ratio test; Bland's rule takes exact ratios and the
    // smallest basic index.
    double theta_max = kInfinity;
    double min_exact = kInfinity;
    for (const int i : column_nz_) {
      if (std::abs(column_[i]) <= pivot_tol_) continue;
      const int b = basic_[i];
      const double rate = -dir * column_[i];
      const auto [lo, hi] = range(b);
      if (rate < 0.0 && std::isfinite(lo)) {
        theta_max = std::min(theta_max, (x_[b] - lo + primal_tol_) / -rate);
        min_exact = std::min(min_exact, std::max(0.0, (x_[b] - lo) / -rate));
      } else if (rate > 0.0 && std::isfinite(hi)) {
        theta_max = std::min(theta_max, (hi - x_[b] + primal_tol_) / rate);
        min_exact = std::min(min_exact, std::max(0.0, (hi - x_[b]) / rate));
      }
    }
    int leave_row = -1;
    double leave_ratio = kInfinity;
    double leave_bound = 0.0;
    std::int8_t leave_status = kLower;
    double best_alpha = 0.0;
    for (const int i : column_nz_) {
      if (std::abs(column_[i]) <= pivot_tol_) continue;
      const int b = basic_[i];
      const double rate = -dir * column_[i];
      const auto [lo, hi] = range(b);
      double exact;
      double bound;
      std::int8_t st;
      if (rate < 0.0 && std::isfinite(lo)) {
        exact = (x_[b] - lo) / -rate;
        bound = lo;
        st = (lo == ub_[b] && lo != lb_[b]) ? kUpper : kLower;
      } else if (rate > 0.0 && std::isfinite(hi)) {
        exact = (hi - x_[b]) / rate;
        bound = hi;
        st = (hi == lb_[b] && hi != ub_[b]) ? kLower : kUpper;
      } else {
        continue;
      }
      const bool take = bland ? std::max(0.0, exact) <= min_exact + 1e-12 &&
                                    (leave_row < 0 || b < basic_[leave_row])
                              : exact <= theta_max && std::abs(column_[i]) > best_alpha;
      if (take) {
        best_alpha = std::abs(column_[i]);
        leave_row = i;
        leave_ratio = std::max(0.0, exact);
        leave_bound = bound;
        leave_status = st;
      }
    }

    const double flip = ub_[q] - lb_[q];
    const bool do_flip = std::isfinite(flip) && (leave_row < 0 || flip <= leave_ratio);
    if (leave_row < 0 && !do_flip) {
      return phase_one_ ? LpStatus::numerical_failure : LpStatus::unbounded;
    }
    const double theta = do_flip ? flip : leave_ratio;
    const double step = dir * theta;
    if (step != 0.0) {
      for (const int i : column_nz_) x_[basic_[i]] -= step * column_[i];
    }
    if (do_flip) {
      status_[q] = status_[q] == kLower ? kUpper : kLower;
      x_[q] = nonbasic_value(q);
      set_direction(q, -dir);
    } else {
      x_[q] += step;
      pivot(q, leave_row, leave_bound, leave_status);
    }

    if (theta > 0.0) {
      stall = 0;
      bland = false;
    } else if (++stall >= kStallLimit) {
      bland = true;
    }
  }
}

bool LpEngine::dual_feasible() const {
  for (int p = 0; p < num_active(); ++p) {
    if (-(dir_act_[p] * d_act_[p]) > dual_tol_) return false;
  }
  for (int r = 0; r < m_; ++r) {
    if (-(dir_log_[r] * d_log_[r]) > dual_tol_) return false;
  }
  return true;
}

void LpEngine::compute_pivot_row(int row) {
  std::fill(work_.begin(), work_.end(), 0.0);
  work_[row] = 1.0;
  btran(work_);
  // column_dots yields -rho.a_j.
  const int count = num_active();
  kernels_.column_dots(act_ell_, 0, count, work_.data(), nullptr, prow_act_.data());
  for (int p = 0; p < count; ++p) prow_act_[p] = -prow_act_[p];
  if (!act_long_.empty()) {
    const auto cs = model_.col_start();
    const auto ri = model_.row_index();
    const auto cv = model_.col_value();
    for (const int pos : act_long_) {
      const int j = active_vars_[pos];
      double acc = 0.0;
      for (auto p = cs[j]; p < cs[j + 1]; ++p) acc += work_[ri[p]] * cv[p];
      prow_act_[pos] = acc;
    }
  }
  for (int r = 0; r < m_; ++r) prow_log_[r] = work_[r];
}

// No active column can repair the leaving row. Look along the whole row and
// activate the eligible columns with the smallest dual ratios.
bool LpEngine::activate_dual_candidates(bool below) {
  if (num_active() == n_) return false;
  price_all();
  kernels_.column_dots(ell_, 0, n_, work_.data(), nullptr, prow_full_.data());
  const auto cs = model_.col_start();
  const auto ri = model_.row_index();
  const auto cv = model_.col_value();
  for (const int j : long_columns_) {
    double acc = 0.0;
    for (auto p = cs[j]; p < cs[j + 1]; ++p) acc += work_[ri[p]] * cv[p];
    prow_full_[j] = -acc;
  }
  std::vector<std::pair<double, int>> found;
  for (int j = 0; j < n_; ++j) {
    const double dir = dir_full_[j];
    if (active_pos_[j] >= 0 || dir == 0.0) continue;
    const double a = -prow_full_[j];
    if (std::abs(a) <= pivot_tol_) continue;
    if (below ? dir * a < 0.0 : dir * a > 0.0) {
      found.emplace_back(std::abs(d_full_[j]) / std::abs(a), j);
    }
  }
  if (found.empty()) return false;
  const auto keep = std::min(found.size(), static_cast<std::size_t>(activation_batch_));
  std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(keep),
                    found.end());
  for (std::size_t k = 0; k < keep; ++k) activate(found[k].second);
  return true;
}

LpStatus LpEngine::reoptimize() {
  refactor();
  compute_basic_values();
  return dual();
}

LpStatus LpEngine::dual() {
  phase_one_ = false;
  compute_duals(false);
  price_active();
  if (!dual_feasible()) return primal();

  const std::int64_t limit = iterations_ + 10LL * (n_ + m_) + 10000;
  int stall = 0;
  while (true) {
    if (iterations_ > limit) return primal();
    if (out_of_time()) return LpStatus::time_limit;
    if (updates_since_refactor_ >= kRefactorInterval) {
      refactor();
      compute_basic_values();
    }
    int row = -1;
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double inf = infeasibility(basic_[r]);
      if (inf > worst) {
        worst = inf;
        row = r;
      }
    }
    if (row < 0) {
      refactor();
      compute_basic_values();
      if (total_infeasibility() > 0.0) continue;
      // Full pricing pass, which also cleans up any dual slip.
      return primal();
    }
    compute_duals(false);
    price_active();
    const int leaving = basic_[row];
    const bool below = x_[leaving] < lb_[leaving];
    const double target = below ? lb_[leaving] : ub_[leaving];
    compute_pivot_row(row);

    // Moving an eligible column in its allowed direction pushes the leaving
    // variable toward its violated bound. Harris two-pass on |d| / |alpha|.
    const int count = num_active();
    auto eligible = [&](double dir, double a) {
      if (dir == 0.0 || std::abs(a) <= pivot_tol_) return false;
      return below ? dir * a < 0.0 : dir * a > 0.0;
    };
    double theta_max = kInfinity;
    for (int p = 0; p < count; ++p) {
      if (!eligible(dir_act_[p], prow_act_[p])) continue;
      theta_max =
          std::min(theta_max, (std::abs(d_act_[p]) + dual_tol_) / std::abs(prow_act_[p]));
    }
    for (int r = 0; r < m_; ++r) {
      if (!eligible(dir_log_[r], prow_log_[r])) continue;
      theta_max =
          std::min(theta_max, (std::abs(d_log_[r]) + dual_tol_) / std::abs(prow_log_[r]));
    }
    int q = -1;
    double q_d = 0.0;
    double best_alpha = 0.0;
    for (int p = 0; p < count; ++p) {
      if (!eligible(dir_act_[p], prow_act_[p])) continue;
      const double a = std::abs(prow_act_[p]);
      if (std::abs(d_act_[p]) / a <= theta_max && a > best_alpha) {
        best_alpha = a;
        q = active_vars_[p];
        q_d = d_act_[p];
      }
    }
    for (int r = 0; r < m_; ++r) {
      if (!eligible(dir_log_[r], prow_log_[r])) continue;
      const double a = std::abs(prow_log_[r]);
      if (std::abs(d_log_[r]) / a <= theta_max && a > best_alpha) {
        best_alpha = a;
        q = n_ + r;
        q_d = d_log_[r];
      }
    }
    if (q < 0) {
      if (activate_dual_candidates(below)) continue;
      return LpStatus::infeasible;
    }
    ++iterations_;

    load_entering_column(q);
    if (std::abs(column_[row]) <= pivot_tol_) {
      if (updates_since_refactor_ == 0) return primal();
      refactor();
      compute_basic_values();
      continue;
    }
    const double delta = (x_[leaving] - target) / column_[row];
    for (const int i : column_nz_) x_[basic_[i]] -= delta * column_[i];
    x_[q] += delta;
    pivot(q, row, target, below ? kLower : kUpper);

    if (std::abs(q_d) > dual_tol_) {
      stall = 0;
    } else if (++stall >= 4 * kStallLimit) {
      return primal();
    }
  }
}

std::vector<double> LpEngine::reduced_costs() {
  phase_one_ = false;
  compute_duals(false);
  price_all();
  std::vector<double> rc(n_);
  for (int j = 0; j < n_; ++j) rc[j] = status_[j] == kBasic ? 0.0 : -d_full_[j];
  return rc;
}

std::vector<double> LpEngine::tableau_row(int row) {
  std::fill(work_.begin(), work_.end(), 0.0);
  work_[row] = 1.0;
  btran(work_);
  kernels_.column_dots(ell_, 0, n_, work_.data(), nullptr, prow_full_.data());
  std::vector<double> out(n_ + m_);
  for (int j = 0; j < n_; ++j) out[j] = -prow_full_[j];
  const auto cs = model_.col_start();
  const auto ri = model_.row_index();
  const auto cv = model_.col_value();
  for (const int j : long_columns_) {
    double acc = 0.0;
    for (auto p = cs[j]; p < cs[j + 1]; ++p) acc += work_[ri[p]] * cv[p];
    out[j] = acc;
  }
  for (int r = 0; r < m_; ++r) out[n_ + r] = work_[r];
  return out;
}

double LpEngine::objective() const { return -cost_value(); }

std::vector<double> LpEngine::structural_values() const {
  return {x_.begin(), x_.begin() + n_};
}

}  // namespace rideshare::mip
