#include "rideshare/mip/cuts.h"

#include <algorithm>
#include <cmath>

namespace rideshare::mip {

namespace {

constexpr double kMinFraction = 0.005;
constexpr double kTinyCoef = 1e-9;
constexpr double kMaxDynamism = 1e8;

double frac(double v) { return v - std::floor(v); }

// A row whose slack can only take integer values on integer points.
bool integral_slack(const LinearModel& model, const Constraint& c) {
  if (c.rhs != std::floor(c.rhs)) return false;
  return std::all_of(c.terms.begin(), c.terms.end(), [&](const Term& t) {
    return model.variable(t.var).integer && t.coef == std::floor(t.coef);
  });
}

// sum(coef[j] * x_j) <= rhs over a sparse set of variables.
struct Aggregate {
  std::vector<double> coef;
  std::vector<char> member;
  std::vector<int> touched;  // each variable at most once
  double rhs = 0.0;

  void resize(int n) {
    coef.assign(n, 0.0);
    member.assign(n, 0);
  }
  void add(const Constraint& c, double scale) {
    for (const auto& t : c.terms) {
      if (!member[t.var]) {
        member[t.var] = 1;
        touched.push_back(t.var);
      }
      coef[t.var] += scale * t.coef;
    }
    rhs += scale * c.rhs;
  }
  void clear() {
    for (const int j : touched) {
      coef[j] = 0.0;
      member[j] = 0;
    }
    touched.clear();
    rhs = 0.0;
  }
};

constexpr int kMaxAggregation = 4;
constexpr double kMinEfficacy = 1e-6;

// Best MIR cut of one aggregated row over a few divisors, in <= form.
// Returns false when no violated cut is found.
bool separate_mir(const LinearModel& model, const LpEngine& lp, const Aggregate& agg,
                  std::vector<Term>& out, double& out_rhs, double& out_efficacy) {
  struct Item {
    int var;
    double a;      // coefficient on the substituted variable
    double value;  // substituted variable at the relaxation point
    bool integer;
    bool upper;    // substituted as ub - x
  };
  std::vector<Item> items;
  double b = agg.rhs;
  for (const int j : agg.touched) {
    const double a = agg.coef[j];
    if (std::abs(a) < kTinyCoef) {
      // Relax the negligible term away with a bound.
      const double bound = a > 0 ? lp.lower(j) : lp.upper(j);
      if (!std::isfinite(bound)) return false;
      b -= a * bound;
      continue;
    }
    const double lo = lp.lower(j), hi = lp.upper(j), x = lp.value(j);
    const bool integer = model.variable(j).integer;
    bool upper;
    if (!std::isfinite(lo) && !std::isfinite(hi)) return false;
    if (!std::isfinite(lo)) {
      upper = true;
    } else if (!std::isfinite(hi)) {
      upper = false;
    } else {
      upper = x - lo > hi - x;
    }
    if (upper) {
      items.push_back({j, -a, hi - x, integer, true});
      b -= a * hi;
    } else {
      items.push_back({j, a, x - lo, integer, false});
      b -= a * lo;
    }
  }

  std::vector<double> divisors;
  for (const auto& it : items) {
    if (!it.integer || it.value <= 1e-6) continue;
    const double d = std::abs(it.a);
    if (std::find(divisors.begin(), divisors.end(), d) == divisors.end()) divisors.push_back(d);
  }
  if (divisors.empty()) return false;
  std::sort(divisors.begin(), divisors.end());
  if (divisors.size() > 8) divisors.resize(8);

  std::vector<double> cut_coef(items.size());
  double best_eff = kMinEfficacy;
  double best_delta = 0.0;
  auto evaluate = [&](double delta) {
    const double beta = b / delta;
    const double f0 = frac(beta);
    if (f0 < 0.01 || f0 > 0.99) return -1.0;
    double lhs = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < items.size(); ++k) {
      const auto& it = items[k];
      const double a = it.a / delta;
      double c;
      if (it.integer) {
        c = std::floor(a) + std::max(0.0, frac(a) - f0) / (1.0 - f0);
      } else {
        c = a < 0.0 ? a / (1.0 - f0) : 0.0;
      }
      cut_coef[k] = c;
      lhs += c * it.value;
      norm += c * c;
    }
    if (norm == 0.0) return -1.0;
    return (lhs - std::floor(beta)) / std::sqrt(norm);
  };
  auto consider = [&](double delta) {
    const double eff = evaluate(delta);
    if (eff > best_eff) {
      best_eff = eff;
      best_delta = delta;
    }
  };
  for (const double d : divisors) consider(d);
  if (best_delta > 0.0) {
    const double base = best_delta;
    for (const double k : {2.0, 4.0, 8.0}) consider(base / k);
  }
  if (best_delta == 0.0) return false;

  evaluate(best_delta);
  out.clear();
  double rhs = std::floor(b / best_delta);
  double largest = 0.0, smallest = kInfinity;
  for (std::size_t k = 0; k < items.size(); ++k) {
    double c = cut_coef[k];
    if (c == 0.0) continue;
    const auto& it = items[k];
    // Back to x: ub - x or x - lb.
    if (it.upper) {
      rhs -= c * lp.upper(it.var);
      c = -c;
    } else {
      rhs += c * lp.lower(it.var);
    }
    out.push_back({it.var, c});
    largest = std::max(largest, std::abs(c));
    smallest = std::min(smallest, std::abs(c));
  }
  if (out.empty() || largest > kMaxDynamism * smallest) return false;
  out_rhs = rhs;
  out_efficacy = best_eff;
  return true;
}

}  // namespace

std::vector<Cut> mir_cuts(const LinearModel& model, const LpEngine& lp, int max_cuts) {
  const int n = model.num_variables();
  const int m = model.num_constraints();
  // Rows containing each continuous variable, for aggregation.
  std::vector<std::vector<int>> rows_of(n);
  for (int r = 0; r < m; ++r) {
    for (const auto& t : model.constraint(r).terms) {
      if (!model.variable(t.var).integer) rows_of[t.var].push_back(r);
    }
  }

  struct Found {
    double efficacy;
    int order;
    Cut cut;
  };
  std::vector<Found> found;
  Aggregate agg;
  agg.resize(n);
  std::vector<char> used(m, 0);
  std::vector<int> used_list;
  std::vector<Term> terms;

  for (int r = 0; r < m; ++r) {
    const auto& row = model.constraint(r);
    const bool has_integer = std::any_of(row.terms.begin(), row.terms.end(), [&](const Term& t) {
      return model.variable(t.var).integer;
    });
    if (!has_integer) continue;
    for (const double orientation : {1.0, -1.0}) {
      if (orientation > 0 && row.sense == Sense::greater_equal) continue;
      if (orientation < 0 && row.sense == Sense::less_equal) continue;
      agg.clear();
      for (const int u : used_list) used[u] = 0;
      used_list.clear();
      agg.add(row, orientation);
      used[r] = 1;
      used_list.push_back(r);
      for (int depth = 0; depth <= kMaxAggregation; ++depth) {
        double rhs = 0.0, eff = 0.0;
        if (separate_mir(model, lp, agg, terms, rhs, eff)) {
          Cut cut;
          for (const auto& t : terms) cut.terms.push_back({t.var, -t.coef});
          cut.rhs = -rhs;
          found.push_back({eff, static_cast<int>(found.size()), std::move(cut)});
          break;
        }
        if (depth == kMaxAggregation) break;
        // Eliminate the continuous variable farthest inside its bounds.
        int pick = -1;
        double pick_dist = 1e-6;
        for (const int j : agg.touched) {
          if (model.variable(j).integer || std::abs(agg.coef[j]) < kTinyCoef) continue;
          const double dist = std::min(lp.value(j) - lp.lower(j), lp.upper(j) - lp.value(j));
          if (dist > pick_dist) {
            pick_dist = dist;
            pick = j;
          }
        }
        if (pick < 0) break;
        int with = -1;
        double scale = 0.0;
        for (const int r2 : rows_of[pick]) {
          if (used[r2]) continue;
          const auto& c2 = model.constraint(r2);
          double a2 = 0.0;
          for (const auto& t : c2.terms) {
            if (t.var == pick) a2 += t.coef;
          }
          if (a2 == 0.0) continue;
          const double s = -agg.coef[pick] / a2;
          // Only non-negative multiples of <= rows keep the <= sense.
          if ((c2.sense == Sense::less_equal && s < 0) ||
              (c2.sense == Sense::greater_equal && s > 0)) {
            continue;
          }
          with = r2;
          scale = s;
          break;
        }
        if (with < 0) break;
        agg.add(model.constraint(with), scale);
        agg.coef[pick] = 0.0;
        used[with] = 1;
        used_list.push_back(with);
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    if (a.efficacy != b.efficacy) return a.efficacy > b.efficacy;
    return a.order < b.order;
  });
  std::vector<Cut> cuts;
  for (auto& f : found) {
    if (static_cast<int>(cuts.size()) >= max_cuts) break;
    cuts.push_back(std::move(f.cut));
  }
  return cuts;
}

std::vector<Cut> gomory_cuts(const LinearModel& model, LpEngine& lp, int max_cuts,
                             double integrality_tol) {
  const int n = model.num_variables();
  const int m = model.num_constraints();
  std::vector<std::pair<double, int>> rows;
  for (int r = 0; r < m; ++r) {
    const int b = lp.basic_variable(r);
    if (b >= n || !model.variable(b).integer) continue;
    const double f0 = frac(lp.value(b));
    if (f0 < std::max(kMinFraction, integrality_tol) || f0 > 1.0 - std::max(kMinFraction, integrality_tol)) continue;
    rows.emplace_back(std::abs(f0 - 0.5), r);
  }
  std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return lp.basic_variable(a.second) < lp.basic_variable(b.second);
  });
  if (static_cast<int>(rows.size()) > max_cuts) rows.resize(max_cuts);

  std::vector<char> int_slack(m);
  for (int r = 0; r < m; ++r) int_slack[r] = integral_slack(model, model.constraint(r));

  std::vector<Cut> cuts;
  std::vector<double> pi(n);
  for (const auto& [unused, r] : rows) {
    const double f0 = frac(lp.value(lp.basic_variable(r)));
    const auto alpha = lp.tableau_row(r);
    std::fill(pi.begin(), pi.end(), 0.0);
    double pi0 = 1.0;
    bool usable = true;
    for (int j = 0; j < n + m && usable; ++j) {
      if (lp.is_basic(j) || alpha[j] == 0.0) continue;
      const double lo = lp.lower(j);
      const double hi = lp.upper(j);
      if (lo == hi) continue;
      const bool upper = lp.at_upper(j);
      const double a = upper ? -alpha[j] : alpha[j];
      const bool integer = j < n ? model.variable(j).integer : int_slack[j - n] != 0;
      double g;
      if (integer) {
        const double fj = frac(a);
        g = fj <= f0 ? fj / f0 : (1.0 - fj) / (1.0 - f0);
      } else {
        g = a >= 0.0 ? a / f0 : -a / (1.0 - f0);
      }
      if (g == 0.0) continue;
      // g * s >= ... with s the distance of j from its active bound.
      const double sign = upper ? -1.0 : 1.0;
      const double at = upper ? hi : lo;
      if (j < n) {
        pi[j] += sign * g;
        pi0 += sign * g * at;
        continue;
      }
      // Logical of row k: s = rhs - a_k.x.
      const auto& row = model.constraint(j - n);
      for (const auto& t : row.terms) pi[t.var] -= sign * g * t.coef;
      pi0 -= sign * g * (row.rhs - at);
    }
    // Drop negligible coefficients by relaxing with the variable bounds.
    Cut cut;
    double largest = 0.0;
    double smallest = kInfinity;
    for (int j = 0; j < n; ++j) {
      const double c = pi[j];
      if (c == 0.0) continue;
      if (std::abs(c) < kTinyCoef) {
        const double worst = c > 0.0 ? c * lp.upper(j) : c * lp.lower(j);
        if (!std::isfinite(worst)) {
          usable = false;
          break;
        }
        pi0 -= worst;
        continue;
      }
      cut.terms.push_back({j, c});
      largest = std::max(largest, std::abs(c));
      smallest = std::min(smallest, std::abs(c));
    }
    if (!usable || cut.terms.empty() || largest > kMaxDynamism * smallest) continue;
    cut.rhs = pi0;
    double activity = 0.0;
    double norm = 0.0;
    for (const auto& t : cut.terms) {
      activity += t.coef * lp.value(t.var);
      norm += t.coef * t.coef;
    }
    if ((cut.rhs - activity) / std::sqrt(norm) < 1e-6) continue;
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

LinearModel with_cuts(const LinearModel& model, const std::vector<Cut>& cuts) {
  LinearModel out;
  for (const auto& v : model.variables()) {
    out.add_variable(v.lower, v.upper, v.objective, v.integer);
  }
  for (const auto& c : model.constraints()) out.add_constraint(c.terms, c.sense, c.rhs);
  for (const auto& c : cuts) out.add_constraint(c.terms, Sense::greater_equal, c.rhs);
  out.seal();
  return out;
}

}  // namespace rideshare::mip
