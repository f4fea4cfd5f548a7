#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "rideshare/cli/solver_validation.h"
#include "rideshare/mip/cuts.h"
#include "rideshare/mip/lp_engine.h"
#include "rideshare/mip/model_text.h"
#include "rideshare/mip/solver.h"
#include "support/oracles.h"

using namespace rideshare;
using namespace rideshare::mip;
using testing::TableauResult;

namespace {

// Small general MIP: a few bounded integers, a couple of continuous
// variables, random rows of every sense.
LinearModel random_mip(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ints(1, 5);
  std::uniform_int_distribution<int> conts(0, 2);
  std::uniform_int_distribution<int> rows(1, 5);
  std::uniform_int_distribution<int> dom(1, 4);
  std::uniform_int_distribution<int> icoef(-6, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LinearModel m;
  const int ni = ints(rng);
  const int nc = conts(rng);
  for (int j = 0; j < ni; ++j) m.add_variable(0.0, dom(rng), icoef(rng) + 0.5 * unit(rng), true);
  for (int j = 0; j < nc; ++j) m.add_variable(0.0, 1.0 + 4.0 * unit(rng), icoef(rng) * unit(rng), false);
  const int nr = rows(rng);
  for (int i = 0; i < nr; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < ni + nc; ++j) {
      const int c = icoef(rng);
      if (c != 0) terms.push_back({j, c + (j >= ni ? 0.25 : 0.0)});
    }
    const double rhs = 6.0 * unit(rng) - 1.0 + std::floor(4.0 * unit(rng)) * 0.5;
    const double r = unit(rng);
    m.add_constraint(terms, r < 0.7 ? Sense::less_equal : r < 0.9 ? Sense::greater_equal : Sense::equal,
                     rhs);
  }
  m.seal();
  return m;
}

// Every integer point satisfying the rows, for pure-integer models.
std::vector<std::vector<double>> integer_points(const LinearModel& m) {
  std::vector<std::vector<double>> out;
  std::vector<double> x(m.num_variables());
  auto visit = [&](auto&& self, int j) -> void {
    if (j == m.num_variables()) {
      if (m.max_violation(x) <= 1e-9) out.push_back(x);
      return;
    }
    for (double v = m.variable(j).lower; v <= m.variable(j).upper; v += 1.0) {
      x[j] = v;
      self(self, j + 1);
    }
  };
  visit(visit, 0);
  return out;
}

double cut_lhs(const Cut& c, std::span<const double> x) {
  double s = 0.0;
  for (const auto& t : c.terms) s += t.coef * x[t.var];
  return s;
}

}  // namespace

TEST_CASE("solve_mip keeps an integral relaxation without branching") {
  LinearModel m;
  m.add_variable(0.0, 3.0, 1.0, true);
  m.add_variable(0.0, 2.0, 2.0, true);
  m.add_constraint({{0, 1.0}, {1, 1.0}}, Sense::less_equal, 4.0);
  m.seal();
  const auto lp = solve_lp(m);
  const auto ip = solve_mip(m);
  REQUIRE(ip.status == SolveStatus::optimal);
  CHECK(ip.nodes == 1);
  CHECK(ip.values == lp.values);
  CHECK(ip.objective == 6.0);
}

TEST_CASE("solve_mip on the two-binary example") {
  LinearModel m;
  m.add_variable(0.0, 1.0, 2.0, true);
  m.add_variable(0.0, 1.0, 3.0, true);
  m.add_constraint({{0, 1.0}, {1, 1.0}}, Sense::less_equal, 1.5);
  m.seal();
  const auto s = solve_mip(m);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.values[0] == 0.0);
  CHECK(s.values[1] == 1.0);
  CHECK(s.objective == 3.0);
  const auto b = brute_force_solve(m, 4);
  CHECK(b.objective == 3.0);
}

TEST_CASE("brute force trivial cases and budget refusal") {
  LinearModel cont;
  cont.add_variable(0.0, 4.0, 1.0, false);
  cont.add_variable(0.0, 4.0, -1.0, false);
  cont.add_constraint({{0, 1.0}, {1, 1.0}}, Sense::less_equal, 3.0);
  cont.seal();
  CHECK(brute_force_solve(cont, 1).objective == solve_lp(cont).objective);

  LinearModel bin;
  bin.add_variable(0.0, 1.0, 5.0, true);
  bin.add_variable(0.0, 2.5, 1.0, false);
  bin.add_constraint({{0, 2.0}, {1, 1.0}}, Sense::less_equal, 2.5);
  bin.seal();
  // x=0: y=2.5 gives 2.5; x=1: y=0.5 gives 5.5.
  CHECK(brute_force_solve(bin, 2).objective == doctest::Approx(5.5));

  LinearModel wide;
  for (int j = 0; j < 30; ++j) wide.add_variable(0.0, 3.0, 1.0, true);
  wide.seal();
  CHECK_THROWS_AS(brute_force_solve(wide, 1'000'000), EnumerationLimitError);
}

TEST_CASE("solve_mip matches an independent enumeration on random general MIPs") {
  std::mt19937_64 rng(31337);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto m = random_mip(rng);
    const auto got = solve_mip(m);
    const auto want = testing::enumerate_mip(m);
    if (want.status == TableauResult::Status::infeasible) {
      CHECK(got.status == SolveStatus::infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(want.status == TableauResult::Status::optimal);
    REQUIRE(got.status == SolveStatus::optimal);
    CHECK(std::abs(got.objective - want.objective) <= 1e-6);
    CHECK(m.max_violation(got.values) <= 1e-6);
    CHECK(m.max_integrality_violation(got.values) <= 1e-6);
    const auto lp = solve_lp(m);
    CHECK(got.objective <= lp.objective + 1e-6);
    ++optimal;
  }
  CHECK(optimal > 200);
  CHECK(infeasible > 0);
}

TEST_CASE("solve_mip matches brute force on 200 repositioning-shaped instances") {
  const auto dir = std::filesystem::temp_directory_path() / "rideshare_unit_mismatches";
  const auto rep = cli::validate_solver(200, 4242, dir);
  CHECK(rep.count == 200);
  CHECK(rep.mismatches == 0);
  CHECK(rep.max_deviation <= cli::kValidationTolerance);
  CHECK(rep.dumps.empty());
}

TEST_CASE("solve_mip properties on repositioning-shaped instances") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 100; ++trial) {
    const auto fdr = cli::random_fdr_instance(rng);
    const auto& m = fdr.model;
    const auto a = solve_mip(m);
    REQUIRE(a.status == SolveStatus::optimal);
    CHECK(m.max_violation(a.values) <= 1e-6);
    CHECK(m.max_integrality_violation(a.values) <= 1e-6);
    CHECK(a.objective <= solve_lp(m).objective + 1e-6);

    const auto b = solve_mip(m);
    CHECK(a.values == b.values);
    CHECK(a.objective == b.objective);

    // Scaling the objective by a power of two keeps every pivot choice.
    LinearModel scaled;
    for (const auto& v : m.variables()) scaled.add_variable(v.lower, v.upper, 4.0 * v.objective, v.integer);
    for (const auto& c : m.constraints()) scaled.add_constraint(c.terms, c.sense, c.rhs);
    scaled.seal();
    const auto s = solve_mip(scaled);
    CHECK(s.values == a.values);
    CHECK(s.objective == doctest::Approx(4.0 * a.objective));
  }
}

TEST_CASE("solve_mip under a node limit returns feasible incumbents") {
  std::mt19937_64 rng(8080);
  SolverConfig cfg;
  cfg.node_limit = 1;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_mip(rng);
    const auto s = solve_mip(m, cfg);
    if (s.status == SolveStatus::node_limit && s.has_values()) {
      CHECK(m.max_violation(s.values) <= 1e-6);
      CHECK(m.max_integrality_violation(s.values) <= 1e-6);
      CHECK(s.bound >= s.objective - 1e-9);
    }
    if (s.status == SolveStatus::optimal) {
      CHECK(std::abs(s.objective - solve_mip(m).objective) <= 1e-6);
    }
  }
}

TEST_CASE("solve_mip cuts never remove an integer point") {
  std::mt19937_64 rng(404);
  int with_cuts = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LinearModel m;
    std::uniform_int_distribution<int> n(2, 4);
    std::uniform_int_distribution<int> coef(-5, 7);
    std::uniform_int_distribution<int> dom(1, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int vars = n(rng);
    for (int j = 0; j < vars; ++j) m.add_variable(0.0, dom(rng), coef(rng), true);
    for (int i = 0; i < 3; ++i) {
      std::vector<Term> terms;
      for (int j = 0; j < vars; ++j) terms.push_back({j, static_cast<double>(coef(rng))});
      m.add_constraint(terms, i == 2 ? Sense::greater_equal : Sense::less_equal,
                       3.0 + 7.0 * unit(rng) - (i == 2 ? 9.0 : 0.0));
    }
    m.seal();
    LpEngine lp(m, 1e-7);
    if (lp.solve() != LpStatus::optimal) continue;
    const auto x = lp.structural_values();
    const auto points = integer_points(m);
    auto mir = mir_cuts(m, lp, 20);
    auto gmi = gomory_cuts(m, lp, 20, 1e-6);
    for (const auto* set : {&mir, &gmi}) {
      for (const auto& c : *set) {
        ++with_cuts;
        CHECK(cut_lhs(c, x) < c.rhs);
        for (const auto& p : points) REQUIRE(cut_lhs(c, p) >= c.rhs - 1e-7);
      }
    }
  }
  CHECK(with_cuts > 50);
}

TEST_CASE("model text round-trips exactly") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto fdr = cli::random_fdr_instance(rng);
    const auto text = model_to_string(fdr.model);
    std::istringstream in(text);
    const auto back = read_model(in);
    CHECK(model_to_string(back) == text);
    CHECK(solve_mip(back).objective == solve_mip(fdr.model).objective);
  }
  std::istringstream bad("var 0 0 1 int 1\nrow le 1 3:1\n");
  CHECK_THROWS_AS(read_model(bad), ModelError);
  std::istringstream junk("var 0 zero 1 int 1\n");
  CHECK_THROWS_AS(read_model(junk), ModelError);
}

TEST_CASE("sealed models are immutable and validated") {
  LinearModel m;
  m.add_variable(0.0, 1.0, 1.0, true);
  m.seal();
  CHECK_THROWS_AS(m.add_variable(0.0, 1.0, 1.0, false), ModelError);
  LinearModel dangling;
  dangling.add_variable(0.0, 1.0, 1.0, false);
  dangling.add_constraint({{3, 1.0}}, Sense::less_equal, 1.0);
  CHECK_THROWS_AS(dangling.seal(), ModelError);
}
