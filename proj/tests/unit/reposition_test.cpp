#include <doctest.h>

#include <random>
#include <set>

#include "rideshare/mip/solver.h"
#include "rideshare/reposition/planner.h"
#include "support/fdr_oracle.h"
#include "support/synthetic.h"

using namespace rideshare;
using namespace rideshare::reposition;

namespace {

constexpr std::int64_t kEnum = std::int64_t{1} << 40;

struct Instance {
  FleetSnapshot snap;
  demand::DemandForecast forecast;
  geo::TravelTimeMatrix t;
  RepositionParams params;
  FdrInputs inputs;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> areas(1, 3);
  std::uniform_int_distribution<int> small(0, 3);
  std::uniform_int_distribution<int> secs(3, 60);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance in;
  const int n = areas(rng);
  in.params.coverage_s = 10.0 * std::uniform_int_distribution<int>(6, 48)(rng);
  in.params.productivity = std::uniform_int_distribution<int>(1, 8)(rng);
  in.params.touring_weight = 0.1 + 0.9 * unit(rng);
  in.params.coverage_time_weight = 1.0 + 0.5 * unit(rng);
  in.t = geo::TravelTimeMatrix(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) in.t.set(i, j, i == j ? 0.0 : 10.0 * secs(rng));
  }
  in.snap.touring.resize(n);
  in.snap.repositioning.resize(n);
  int id = 0;
  for (int a = 0; a < n; ++a) {
    for (int k = small(rng); k > 0; --k) in.snap.idle.push_back({id++, {}, a});
    in.snap.touring[a] = small(rng);
    in.snap.repositioning[a] = small(rng) % 3;
  }
  in.forecast.horizon_s = in.params.horizon_s;
  for (int a = 0; a < n; ++a) in.forecast.values.push_back(small(rng));
  for (int a = 0; a < n; ++a) in.inputs.valid_target.push_back(unit(rng) < 0.8);
  return in;
}


geo::TravelTimeMatrix two_areas(double t12) {
  geo::TravelTimeMatrix t(2);
  t.set(0, 1, t12);
  t.set(1, 0, t12);
  return t;
}

}  // namespace

TEST_CASE("zero forecast gives an empty plan") {
  Instance in;
  in.t = two_areas(120.0);
  in.snap.idle = {{0, {}, 0}, {1, {}, 1}};
  in.snap.touring = {1, 0};
  in.snap.repositioning = {0, 0};
  in.forecast = {{0.0, 0.0}, in.params.horizon_s, 0.0};
  in.inputs.valid_target = {1, 1};
  const auto fm = build_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
  const auto s = mip::solve_mip(fm.model);
  REQUIRE(s.status == mip::SolveStatus::optimal);
  CHECK(s.objective == 0.0);
  const auto sol = extract_solution(fm, s);
  CHECK(sol.moves.empty());
  CHECK(sol.coverage.empty());
  const auto full = testing::full_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
  CHECK(mip::brute_force_solve(full.model, kEnum).objective == 0.0);

  TargetPool pool(2);
  const auto plan = plan_fdr(in.snap, in.forecast, in.t, in.params, in.inputs, pool,
                             geo::TravelTimeProvider::constant_speed(), 1, {});
  CHECK(plan.assignments.empty());
  CHECK_FALSE(plan.skipped);
}

TEST_CASE("reachability forces a move in the two-area example") {
  Instance in;
  in.t = two_areas(300.0);
  in.params.coverage_s = 240.0;
  in.params.productivity = 1.0;
  in.snap.idle = {{0, {}, 0}};
  in.snap.touring = {0, 0};
  in.snap.repositioning = {0, 0};
  in.forecast = {{0.0, 2.0}, in.params.horizon_s, 0.0};
  in.inputs.valid_target = {1, 1};
  const auto fm = build_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
  const auto s = mip::solve_mip(fm.model);
  REQUIRE(s.status == mip::SolveStatus::optimal);
  const auto sol = extract_solution(fm, s);
  REQUIRE(sol.moves.size() == 1);
  CHECK(sol.moves[0].from == 0);
  CHECK(sol.moves[0].to == 1);
  CHECK(sol.moves[0].count == 1);
  REQUIRE(sol.coverage.size() == 1);
  CHECK(sol.coverage[0].from == 1);
  CHECK(sol.coverage[0].to == 1);
  CHECK(sol.coverage[0].amount == doctest::Approx(1.0));
  for (const auto& c : fm.coverage) CHECK_FALSE((c.from == 0 && c.to == 1));

  const auto full = testing::full_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
  const auto oracle = mip::brute_force_solve(full.model, kEnum);
  CHECK(oracle.objective == doctest::Approx(s.objective).epsilon(1e-12));
  CHECK(s.objective == doctest::Approx(1000.0 * 2.0 - 10.0 - 300.0));
}

TEST_CASE("in-place coverage needs no move") {
  Instance in;
  in.t = two_areas(120.0);
  in.params.productivity = 8.0;
  in.snap.idle = {{4, {}, 0}};
  in.snap.touring = {0, 0};
  in.snap.repositioning = {0, 0};
  in.forecast = {{5.0, 0.0}, in.params.horizon_s, 0.0};
  in.inputs.valid_target = {1, 1};
  const auto fm = build_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
  const auto s = mip::solve_mip(fm.model);
  const auto sol = extract_solution(fm, s);
  CHECK(sol.moves.empty());
  REQUIRE(sol.coverage.size() == 1);
  CHECK(sol.coverage[0].from == 0);
  CHECK(sol.coverage[0].to == 0);
  CHECK(sol.coverage[0].amount == doctest::Approx(5.0));
  const auto full = testing::full_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
  CHECK(mip::brute_force_solve(full.model, kEnum).objective ==
        doctest::Approx(s.objective).epsilon(1e-12));
}

TEST_CASE("pruned model matches the full program on random instances") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng);
    const auto fm = build_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
    const auto s = mip::solve_mip(fm.model);
    REQUIRE(s.status == mip::SolveStatus::optimal);
    const auto full = testing::full_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
    const auto oracle = mip::brute_force_solve(full.model, kEnum);
    REQUIRE(oracle.status == mip::SolveStatus::optimal);
    CHECK(std::abs(s.objective - oracle.objective) <= 1e-6);

    const auto sol = extract_solution(fm, s);
    const auto idle = in.snap.idle_per_area();
    std::vector<int> out(in.t.size(), 0);
    for (const auto& mv : sol.moves) {
      out[mv.from] += mv.count;
      CHECK(in.inputs.valid_target[mv.to]);
      CHECK(mv.from != mv.to);
    }
    for (int a = 0; a < in.t.size(); ++a) CHECK(out[a] <= idle[a]);
    for (const auto& c : sol.coverage) CHECK(in.t.at(c.from, c.to) <= in.params.coverage_s);
  }
}

TEST_CASE("an extra idle vehicle never lowers covered demand") {
  std::mt19937_64 rng(707);
  for (int trial = 0; trial < 200; ++trial) {
    auto in = random_instance(rng);
    const auto before = testing::full_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
    const double covered = testing::primary_term(before, mip::brute_force_solve(before.model, kEnum).values);
    std::uniform_int_distribution<int> area(0, in.t.size() - 1);
    in.snap.idle.push_back({100, {}, area(rng)});
    const auto after = testing::full_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
    const double more = testing::primary_term(after, mip::brute_force_solve(after.model, kEnum).values);
    CHECK(more >= covered - 1e-6);
  }
}

TEST_CASE("fully covered demand leaves every vehicle in place") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 200; ++trial) {
    auto in = random_instance(rng);
    for (int a = 0; a < in.t.size(); ++a) {
      const double own = in.params.productivity *
                         (in.snap.idle_per_area()[a] + in.snap.repositioning[a] +
                          in.params.touring_weight * in.snap.touring[a]);
      in.forecast.values[a] = std::min(in.forecast.values[a], std::floor(own));
    }
    const auto fm = build_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
    const auto sol = extract_solution(fm, mip::solve_mip(fm.model));
    CHECK(sol.moves.empty());
    const auto full = testing::full_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs);
    const auto oracle = mip::brute_force_solve(full.model, kEnum);
    for (std::size_t k = 0; k < full.moves.size(); ++k) {
      if (full.moves[k].first >= 0) CHECK(oracle.values[k] == 0.0);
    }
  }
}

TEST_CASE("plan_fdr sends the closest idle vehicle to each target") {
  const auto grid = geo::build_grid(testing::box_of_size({53.5, 9.9}, 6000.0, 1000.0), 3000.0);
  const auto tt = geo::TravelTimeProvider::constant_speed(10.0);
  const auto at = [&](double x) { return geo::unproject(grid, {x, 500.0}); };
  const GeoPoint target = at(3500.0);
  TargetPool pool(2);
  pool.add(grid, target);
  Instance in;
  in.t = two_areas(300.0);
  in.params.coverage_s = 240.0;
  in.params.productivity = 2.0;
  in.snap.idle = {{0, at(1500.0), 0}, {1, at(2500.0), 0}};
  in.snap.touring = {0, 0};
  in.snap.repositioning = {0, 0};
  in.forecast = {{0.0, 4.0}, in.params.horizon_s, 0.0};
  in.inputs = make_inputs(pool);
  REQUIRE(tt.seconds(in.snap.idle[1].position, target) == doctest::Approx(100.0).epsilon(1e-3));
  REQUIRE(tt.seconds(in.snap.idle[0].position, target) == doctest::Approx(200.0).epsilon(1e-3));
  const auto plan = plan_fdr(in.snap, in.forecast, in.t, in.params, in.inputs, pool, tt, 3, {});
  REQUIRE(plan.moves.size() == 1);
  CHECK(plan.moves[0].count == 2);
  REQUIRE(plan.assignments.size() == 2);
  CHECK(plan.assignments[0].vehicle_id == 1);
  CHECK(plan.assignments[1].vehicle_id == 0);
  CHECK(plan.assignments[0].target == target);
  CHECK(plan.assignments[0].target_area == 1);
  CHECK(plan.solve_ms >= 0.0);
}

TEST_CASE("plan_fdr samples distinct targets and is deterministic") {
  testing::SyntheticSpec spec;
  spec.duration_s = 3 * 3600.0;
  const auto reqs = testing::synthetic_requests(spec);
  const auto grid = geo::build_grid(testing::synthetic_bbox(spec), 1000.0);
  const auto tt = geo::TravelTimeProvider::constant_speed();
  const auto matrix = geo::build_area_matrix(grid, tt);
  TargetPool pool(grid.num_areas());
  for (const auto& r : reqs) pool.add(grid, r.origin);
  const int n = grid.num_areas();
  FleetSnapshot snap;
  snap.touring.assign(n, 0);
  snap.repositioning.assign(n, 0);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> area(0, n - 1);
  for (int id = 0; id < 40; ++id) {
    const int a = area(rng);
    snap.idle.push_back({id, geo::area_center(grid, a), a});
  }
  RepositionParams params;
  const auto forecast = demand::perfect_forecast(reqs, grid, spec.start + 3600.0, params.horizon_s);
  const auto inputs = make_inputs(pool);
  // A node budget keeps the search, and so the plan, independent of timing.
  mip::SolverConfig solver;
  solver.node_limit = 500;
  const auto a = plan_fdr(snap, forecast, matrix, params, inputs, pool, tt, 99, solver);
  const auto b = plan_fdr(snap, forecast, matrix, params, inputs, pool, tt, 99, solver);
  REQUIRE_FALSE(a.skipped);
  CHECK(a.objective == b.objective);
  REQUIRE_FALSE(a.assignments.empty());
  REQUIRE(a.assignments.size() == b.assignments.size());
  std::set<int> vehicles;
  std::set<std::pair<double, double>> targets;
  int moved = 0;
  for (const auto& m : a.moves) moved += m.count;
  CHECK(moved == static_cast<int>(a.assignments.size()));
  for (std::size_t k = 0; k < a.assignments.size(); ++k) {
    CHECK(a.assignments[k].vehicle_id == b.assignments[k].vehicle_id);
    CHECK(a.assignments[k].target == b.assignments[k].target);
    CHECK(vehicles.insert(a.assignments[k].vehicle_id).second);
    targets.insert({a.assignments[k].target.lat, a.assignments[k].target.lon});
    CHECK(geo::locate(grid, a.assignments[k].target) == a.assignments[k].target_area);
    CHECK(pool.valid_target(a.assignments[k].target_area));
  }
  CHECK(targets.size() == a.assignments.size());
}

TEST_CASE("REACT sends the nearest idle vehicle") {
  const auto grid = geo::build_grid(testing::box_of_size({53.5, 9.9}, 8000.0, 2000.0), 1000.0);
  const auto tt = geo::TravelTimeProvider::constant_speed(10.0);
  const auto at = [&](double x) { return geo::unproject(grid, {x, 1000.0}); };
  demand::TripRequest rejected;
  rejected.origin = at(500.0);
  std::vector<IdleVehicle> idle{{0, at(500.0 + 4200.0), 4}, {1, at(500.0 + 1800.0), 2}};
  auto plan = react_on_rejection(rejected, idle, grid, tt);
  REQUIRE(plan.assignments.size() == 1);
  CHECK(plan.assignments[0].vehicle_id == 1);
  CHECK(plan.assignments[0].target == rejected.origin);
  CHECK(react_on_rejection(rejected, {}, grid, tt).assignments.empty());

  std::vector<IdleVehicle> tied{{5, at(2300.0), 2}, {3, at(2300.0), 2}};
  CHECK(react_on_rejection(rejected, tied, grid, tt).assignments[0].vehicle_id == 3);

  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> x(0.0, 8000.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<IdleVehicle> fleet;
    for (int id = 0; id < 12; ++id) fleet.push_back({id, at(x(rng)), 0});
    rejected.origin = at(x(rng));
    int best = -1;
    for (const auto& v : fleet) {
      if (best < 0 || tt.seconds(v.position, rejected.origin) <
                          tt.seconds(fleet[best].position, rejected.origin)) {
        best = v.id;
      }
    }
    CHECK(react_on_rejection(rejected, fleet, grid, tt).assignments[0].vehicle_id == best);
  }
}

TEST_CASE("target pool deduplicates and counts distinct origins") {
  const auto grid = geo::build_grid(testing::box_of_size({53.5, 9.9}, 3000.0, 3000.0), 1000.0);
  TargetPool pool(grid.num_areas());
  const auto p = geo::area_center(grid, 4);
  CHECK_FALSE(pool.valid_target(4));
  CHECK(pool.add(grid, p));
  CHECK(pool.valid_target(4));
  CHECK_FALSE(pool.add(grid, p));
  CHECK(pool.points(4).size() == 1);

  testing::SyntheticSpec spec;
  spec.duration_s = 2 * 3600.0;
  auto reqs = testing::synthetic_requests(spec);
  const auto big = geo::build_grid(testing::synthetic_bbox(spec), 1000.0);
  // Repeat some origins exactly.
  for (std::size_t k = 0; k + 7 < reqs.size(); k += 7) reqs[k + 3].origin = reqs[k].origin;
  TargetPool replay(big.num_areas());
  std::set<std::pair<double, double>> distinct;
  for (const auto& r : reqs) {
    replay.add(big, r.origin);
    distinct.insert({r.origin.lat, r.origin.lon});
  }
  std::size_t total = 0;
  for (int a = 0; a < big.num_areas(); ++a) {
    total += replay.points(a).size();
    for (const auto& q : replay.points(a)) CHECK(geo::locate(big, q) == a);
  }
  CHECK(total == distinct.size());
  CHECK(replay.total() == distinct.size());
}

TEST_CASE("repositioning parameters and model inputs are validated") {
  RepositionParams p;
  CHECK_NOTHROW(p.validate());
  p.w1 = 999.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.touring_weight = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.productivity = 0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  Instance in;
  in.t = two_areas(100.0);
  in.snap.touring = {0, 0};
  in.snap.repositioning = {0, 0};
  in.forecast = {{1.0, 1.0, 1.0}, in.params.horizon_s, 0.0};
  in.inputs.valid_target = {1, 1};
  CHECK_THROWS_AS(build_fdr_model(in.snap, in.forecast, in.t, in.params, in.inputs), ConfigError);
}
