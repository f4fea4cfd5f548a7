#include "rideshare/reposition/planner.h"

#include <algorithm>
#include <chrono>
#include <random>

#include "rideshare/mip/solver.h"

namespace rideshare::reposition {

namespace {

std::vector<GeoPoint> sample_targets(const std::vector<GeoPoint>& pool, int count,
                                     std::mt19937_64& rng) {
  std::vector<GeoPoint> out;
  const int n = static_cast<int>(pool.size());
  if (n == 0) return out;
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k;
  const int distinct = std::min(count, n);
  for (int k = 0; k < distinct; ++k) {
    std::uniform_int_distribution<int> pick(k, n - 1);
    std::swap(order[k], order[pick(rng)]);
    out.push_back(pool[order[k]]);
  }
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int k = distinct; k < count; ++k) out.push_back(pool[any(rng)]);
  return out;
}

}  // namespace

RepositionPlan plan_fdr(const FleetSnapshot& snapshot, const demand::DemandForecast& forecast,
                        const geo::TravelTimeMatrix& matrix, const RepositionParams& params,
                        const FdrInputs& inputs, const TargetPool& pool,
                        const geo::TravelTimeProvider& tt, std::uint64_t seed,
                        const mip::SolverConfig& solver) {
  const auto started = std::chrono::steady_clock::now();
  const FdrModel model = build_fdr_model(snapshot, forecast, matrix, params, inputs);
  mip::SolverConfig cfg = solver;
  cfg.time_limit_s = std::min(cfg.time_limit_s, params.interval_s / 2.0);
  const auto sol = mip::solve_mip(model.model, cfg);
  const auto fdr = extract_solution(model, sol);

  RepositionPlan plan;
  plan.status = sol.status;
  plan.objective = sol.objective;
  plan.nodes = sol.nodes;
  plan.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            started)
                      .count();
  if (!sol.has_values()) {
    plan.skipped = true;
    return plan;
  }
  plan.moves = fdr.moves;

  std::vector<std::vector<const IdleVehicle*>> idle_by_area(matrix.size());
  for (const auto& v : snapshot.idle) idle_by_area[v.area].push_back(&v);
  for (auto& list : idle_by_area) {
    std::sort(list.begin(), list.end(),
              [](const IdleVehicle* a, const IdleVehicle* b) { return a->id < b->id; });
  }

  auto order = fdr.moves;
  std::sort(order.begin(), order.end(), [](const Flow& a, const Flow& b) {
    return a.to != b.to ? a.to < b.to : a.from < b.from;
  });
  std::mt19937_64 rng(seed);
  for (const auto& flow : order) {
    auto& candidates = idle_by_area[flow.from];
    for (const auto& target : sample_targets(pool.points(flow.to), flow.count, rng)) {
      int best = -1;
      double best_time = 0.0;
      for (int k = 0; k < static_cast<int>(candidates.size()); ++k) {
        const double secs = tt.seconds(candidates[k]->position, target);
        if (best < 0 || secs < best_time) {
          best = k;
          best_time = secs;
        }
      }
      if (best < 0) break;
      plan.assignments.push_back({candidates[best]->id, target, flow.to});
      candidates.erase(candidates.begin() + best);
    }
  }
  return plan;
}

RepositionPlan react_on_rejection(const demand::TripRequest& rejected,
                                  std::span<const IdleVehicle> idle, const geo::Grid& grid,
                                  const geo::TravelTimeProvider& tt) {
  RepositionPlan plan;
  const IdleVehicle* best = nullptr;
  double best_time = 0.0;
  for (const auto& v : idle) {
    const double secs = tt.seconds(v.position, rejected.origin);
    if (best == nullptr || secs < best_time || (secs == best_time && v.id < best->id)) {
      best = &v;
      best_time = secs;
    }
  }
  if (best != nullptr) {
    plan.assignments.push_back({best->id, rejected.origin, geo::locate(grid, rejected.origin)});
  }
  return plan;
}

}  // namespace rideshare::reposition
