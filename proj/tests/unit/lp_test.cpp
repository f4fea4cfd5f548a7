#include <doctest.h>

#include <random>

#include "rideshare/mip/solver.h"
#include "support/oracles.h"

using namespace rideshare::mip;
using rideshare::testing::TableauResult;
using rideshare::testing::tableau_solve;

namespace {

// Random dense LP with finite bounds, made feasible around a random interior
// point; rows mix all three senses.
LinearModel random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 20);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  const int m = count(rng);
  LinearModel model;
  std::vector<double> point(n);
  for (int j = 0; j < n; ++j) {
    const double lo = unit(rng) < 0.3 ? -5.0 * unit(rng) : 0.0;
    const double hi = lo + 1.0 + 9.0 * unit(rng);
    point[j] = lo + (hi - lo) * unit(rng);
    model.add_variable(lo, hi, coef(rng), false);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) {
      if (unit(rng) < 0.2) continue;
      const double a = coef(rng);
      terms.push_back({j, a});
      lhs += a * point[j];
    }
    const double r = unit(rng);
    if (r < 0.6) model.add_constraint(terms, Sense::less_equal, lhs + 3.0 * unit(rng));
    else if (r < 0.9) model.add_constraint(terms, Sense::greater_equal, lhs - 3.0 * unit(rng));
    else model.add_constraint(terms, Sense::equal, lhs);
  }
  model.seal();
  return model;
}

}  // namespace

TEST_CASE("simplex on single-variable and degenerate models") {
  LinearModel a;
  a.add_variable(0.0, 5.0, 1.0, false);
  a.seal();
  auto s = solve_lp(a);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.values[0] == 5.0);
  CHECK(s.objective == 5.0);

  LinearModel b;
  b.add_variable(0.0, kInfinity, 1.0, false);
  b.add_variable(0.0, kInfinity, 1.0, false);
  b.add_constraint({{0, 1.0}, {1, 1.0}}, Sense::less_equal, 1.0);
  b.seal();
  s = solve_lp(b);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simplex reports infeasible and unbounded models") {
  LinearModel inf;
  inf.add_variable(0.0, 10.0, 1.0, false);
  inf.add_constraint({{0, 1.0}}, Sense::greater_equal, 11.0);
  inf.seal();
  CHECK(solve_lp(inf).status == SolveStatus::infeasible);

  LinearModel unb;
  unb.add_variable(0.0, kInfinity, 1.0, false);
  unb.add_variable(0.0, kInfinity, 0.0, false);
  unb.add_constraint({{0, 1.0}, {1, -1.0}}, Sense::less_equal, 2.0);
  unb.seal();
  CHECK(solve_lp(unb).status == SolveStatus::unbounded);
  CHECK(tableau_solve(unb).status == TableauResult::Status::unbounded);
}

TEST_CASE("simplex matches a tableau reimplementation on 50 random dense LPs") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto model = random_lp(rng);
    const auto got = solve_lp(model);
    const auto want = tableau_solve(model);
    REQUIRE(want.status == TableauResult::Status::optimal);
    REQUIRE(got.status == SolveStatus::optimal);
    CHECK(std::abs(got.objective - want.objective) <= 1e-6);
    CHECK(model.max_violation(got.values) <= 1e-7);
    CHECK(model.objective_value(got.values) == doctest::Approx(got.objective));
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("simplex agrees with the tableau on infeasible random LPs") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    auto base = random_lp(rng);
    LinearModel model;
    for (const auto& v : base.variables()) model.add_variable(v.lower, v.upper, v.objective, false);
    for (const auto& c : base.constraints()) model.add_constraint(c.terms, c.sense, c.rhs);
    // x0 above its own upper bound through a row.
    model.add_constraint({{0, 1.0}}, Sense::greater_equal, base.variable(0).upper + 1.0);
    model.seal();
    CHECK(solve_lp(model).status == SolveStatus::infeasible);
    CHECK(tableau_solve(model).status == TableauResult::Status::infeasible);
  }
}

TEST_CASE("simplex is deterministic") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto model = random_lp(rng);
    const auto a = solve_lp(model);
    const auto b = solve_lp(model);
    CHECK(a.values == b.values);
    CHECK(a.objective == b.objective);
  }
}
