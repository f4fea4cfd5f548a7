#pragma once

#include <vector>

#include "rideshare/demand/forecast.h"
#include "rideshare/geo/travel_time.h"
#include "rideshare/mip/linear_model.h"
#include "rideshare/reposition/target_pool.h"

namespace rideshare::reposition {

struct RepositionParams {
  double horizon_s = 1800.0;        // h
  double interval_s = 180.0;        // f
  double productivity = 8.0;        // p, requests per horizon per vehicle
  double coverage_s = 240.0;        // t^c
  double touring_weight = 0.7;      // alpha
  double coverage_time_weight = 1.05;  // beta
  double w1 = 1000.0;
  double w2 = 10.0;

  // Throws ConfigError naming the offending parameter.
  void validate() const;
};

struct IdleVehicle {
  int id;
  GeoPoint position;
  AreaId area;
};

struct FleetSnapshot {
  double time = 0.0;
  std::vector<IdleVehicle> idle;    // K^id, in ascending id order
  std::vector<int> touring;         // |K^t_a| per area
  std::vector<int> repositioning;   // |K^r_a| per area, by target area

  [[nodiscard]] std::vector<int> idle_per_area() const;
};

struct FdrInputs {
  std::vector<char> valid_target;  // A_r membership per area
};

FdrInputs make_inputs(const TargetPool& pool);

struct FdrModel {
  struct Arc {
    AreaId from;
    AreaId to;
    mip::VarId var;
  };
  mip::LinearModel model;
  std::vector<Arc> moves;     // x_ij
  std::vector<Arc> coverage;  // c_ij
};

// Variables that are zero in every optimal solution are left out: moves out
// of areas without idle vehicles, moves into areas from which no forecast
// demand is reachable, moves from an area to itself, and coverage of areas
// with zero forecast. Idle vehicles cover from where they stand; a move i->j
// transfers one vehicle's capacity from i to j.
FdrModel build_fdr_model(const FleetSnapshot& snapshot, const demand::DemandForecast& forecast,
                         const geo::TravelTimeMatrix& t, const RepositionParams& params,
                         const FdrInputs& inputs);

struct Flow {
  AreaId from;
  AreaId to;
  int count;
};

struct FdrSolution {
  mip::SolveStatus status = mip::SolveStatus::solver_failure;
  double objective = 0.0;
  std::vector<Flow> moves;  // nonzero x_ij, ascending (from, to)
  struct Cover {
    AreaId from;
    AreaId to;
    double amount;
  };
  std::vector<Cover> coverage;  // nonzero c_ij
  std::int64_t nodes = 0;
};

FdrSolution extract_solution(const FdrModel& model, const mip::Solution& sol);

}  // namespace rideshare::reposition
