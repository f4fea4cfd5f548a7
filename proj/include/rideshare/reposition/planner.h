#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rideshare/demand/trips.h"
#include "rideshare/reposition/fdr_model.h"

namespace rideshare::reposition {

struct Assignment {
  int vehicle_id;
  GeoPoint target;
  AreaId target_area;
};

struct RepositionPlan {
  std::vector<Assignment> assignments;
  std::vector<Flow> moves;
  mip::SolveStatus status = mip::SolveStatus::optimal;
  double objective = 0.0;
  double solve_ms = 0.0;  // model build plus solve
  std::int64_t nodes = 0;
  bool skipped = false;   // solver produced no usable solution
};

// Solves the repositioning model and turns the moves into vehicle targets:
// x_ij targets are sampled from P_j (without replacement while the pool
// allows), processed in ascending (j, i) order, and each goes to the
// closest still-unassigned idle vehicle of area i.
RepositionPlan plan_fdr(const FleetSnapshot& snapshot, const demand::DemandForecast& forecast,
                        const geo::TravelTimeMatrix& matrix, const RepositionParams& params,
                        const FdrInputs& inputs, const TargetPool& pool,
                        const geo::TravelTimeProvider& tt, std::uint64_t seed,
                        const mip::SolverConfig& solver);

// Nearest idle vehicle to the rejected pickup, ties to the lowest id.
RepositionPlan react_on_rejection(const demand::TripRequest& rejected,
                                  std::span<const IdleVehicle> idle, const geo::Grid& grid,
                                  const geo::TravelTimeProvider& tt);

}  // namespace rideshare::reposition
