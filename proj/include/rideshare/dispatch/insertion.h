#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rideshare/demand/trips.h"
#include "rideshare/geo/travel_time.h"

namespace rideshare::dispatch {

using demand::TripRequest;
using geo::GeoPoint;

struct DispatchParams {
  int capacity = 4;
  double max_wait_s = 240.0;
  double ride_factor = 1.5;
  double ride_buffer_s = 300.0;
  double dwell_s = 30.0;
};

struct Stop {
  enum class Kind { pickup, dropoff };
  Kind kind = Kind::pickup;
  std::int64_t request_id = 0;
  GeoPoint location;
  int passengers = 1;
  double planned_arrival = 0.0;
  double dwell_s = 0.0;
  // Pickup: latest allowed arrival.
  double deadline = std::numeric_limits<double>::infinity();
  // Dropoff: longest allowed ride, and the departure time of the pickup once
  // it has been served (NaN before that).
  double max_ride_s = std::numeric_limits<double>::infinity();
  double pickup_departure = std::numeric_limits<double>::quiet_NaN();
};

// Stops still to be served. The vehicle leaves `anchor` at `anchor_time`
// (the end of its last dwell, or the current time when it has nothing to do)
// carrying `onboard` passengers. Once anchor_time has passed with stops
// pending, the vehicle is committed to the leg towards stops[0].
struct Route {
  GeoPoint anchor;
  double anchor_time = 0.0;
  int onboard = 0;
  std::vector<Stop> stops;

  [[nodiscard]] bool first_locked(double now) const {
    return !stops.empty() && anchor_time < now;
  }
};

struct InsertionResult {
  bool accepted = false;
  int vehicle_id = -1;
  int pickup_index = -1;   // position of the pickup in the new stop list
  int dropoff_index = -1;  // position of the dropoff in the new stop list
  double delta_cost_s = std::numeric_limits<double>::infinity();
};

double direct_time(const TripRequest& req, const geo::TravelTimeProvider& tt);

// Time at which the vehicle finishes its last stop, or when it is free if the
// route is empty. NaN if the route violates a constraint.
double completion_time(const Route& route, const DispatchParams& params,
                       const geo::TravelTimeProvider& tt, double now);

// Cheapest feasible (pickup, dropoff) placement for req in this route,
// measured as the increase in completion time. Ties keep the first pair in
// (pickup_index, dropoff_index) order.
InsertionResult try_insert(const Route& route, const TripRequest& req,
                           const DispatchParams& params, const geo::TravelTimeProvider& tt,
                           double now);

// Route with req inserted at the given positions and planned arrivals filled in.
Route apply_insertion(const Route& route, const TripRequest& req, int pickup_index,
                      int dropoff_index, const DispatchParams& params,
                      const geo::TravelTimeProvider& tt, double now);

struct Candidate {
  int vehicle_id;
  const Route* route;
};

// Cheapest insertion over all candidates; ties go to the lowest vehicle id.
InsertionResult dispatch(std::span<const Candidate> fleet, const TripRequest& req,
                         const DispatchParams& params, const geo::TravelTimeProvider& tt,
                         double now);

}  // namespace rideshare::dispatch
