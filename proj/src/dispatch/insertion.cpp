#include "rideshare/dispatch/insertion.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rideshare::dispatch {

namespace {

constexpr double kEps = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double start_time(const Route& route, double now) {
  return route.first_locked(now) ? route.anchor_time : std::max(route.anchor_time, now);
}

struct PickupDeparture {
  std::int64_t request_id;
  double time;
};

// Drives the stop sequence from the anchor. Returns the completion time, or
// NaN at the first violated constraint.
template <typename StopAt>
double simulate(const Route& route, double start, int count, StopAt&& stop_at,
                const DispatchParams& params, const geo::TravelTimeProvider& tt,
                double* arrivals) {
  PickupDeparture departures[64];
  std::vector<PickupDeparture> overflow;
  int num_departures = 0;
  auto remember = [&](std::int64_t id, double time) {
    if (num_departures < 64) {
      departures[num_departures++] = {id, time};
    } else {
      overflow.push_back({id, time});
    }
  };
  auto lookup = [&](std::int64_t id) {
    for (int k = 0; k < num_departures; ++k) {
      if (departures[k].request_id == id) return departures[k].time;
    }
    for (const auto& d : overflow) {
      if (d.request_id == id) return d.time;
    }
    return kNaN;
  };

  double t = start;
  GeoPoint at = route.anchor;
  int load = route.onboard;
  if (load > params.capacity) return kNaN;
  for (int k = 0; k < count; ++k) {
    const Stop& s = stop_at(k);
    t += tt.seconds(at, s.location);
    at = s.location;
    if (arrivals != nullptr) arrivals[k] = t;
    if (s.kind == Stop::Kind::pickup) {
      if (t > s.deadline + kEps) return kNaN;
      load += s.passengers;
      if (load > params.capacity) return kNaN;
      remember(s.request_id, t + s.dwell_s);
    } else {
      load -= s.passengers;
      if (load < 0) return kNaN;
      double picked = s.pickup_departure;
      if (std::isnan(picked)) picked = lookup(s.request_id);
      if (std::isnan(picked)) return kNaN;
      if (t - picked > s.max_ride_s + kEps) return kNaN;
    }
    t += s.dwell_s;
  }
  return t;
}

std::pair<Stop, Stop> stops_for(const TripRequest& req, const DispatchParams& params,
                                const geo::TravelTimeProvider& tt) {
  Stop pickup;
  pickup.kind = Stop::Kind::pickup;
  pickup.request_id = req.id;
  pickup.location = req.origin;
  pickup.passengers = req.passengers;
  pickup.dwell_s = params.dwell_s;
  pickup.deadline = req.request_time + params.max_wait_s;
  Stop dropoff;
  dropoff.kind = Stop::Kind::dropoff;
  dropoff.request_id = req.id;
  dropoff.location = req.destination;
  dropoff.passengers = req.passengers;
  dropoff.dwell_s = params.dwell_s;
  dropoff.max_ride_s = params.ride_factor * direct_time(req, tt) + params.ride_buffer_s;
  return {pickup, dropoff};
}

}  // namespace

double direct_time(const TripRequest& req, const geo::TravelTimeProvider& tt) {
  return tt.seconds(req.origin, req.destination);
}

double completion_time(const Route& route, const DispatchParams& params,
                       const geo::TravelTimeProvider& tt, double now) {
  return simulate(
      route, start_time(route, now), static_cast<int>(route.stops.size()),
      [&](int k) -> const Stop& { return route.stops[k]; }, params, tt, nullptr);
}

InsertionResult try_insert(const Route& route, const TripRequest& req,
                           const DispatchParams& params, const geo::TravelTimeProvider& tt,
                           double now) {
  InsertionResult best;
  if (req.passengers > params.capacity) return best;
  const double start = start_time(route, now);
  const auto [pickup, dropoff] = stops_for(req, params, tt);
  const int n = static_cast<int>(route.stops.size());
  const int first = route.first_locked(now) ? 1 : 0;

  // Departure time and place before each insertion slot; stops ahead of the
  // pickup are unaffected by the insertion.
  std::vector<double> depart(n + 1);
  std::vector<GeoPoint> place(n + 1);
  depart[0] = start;
  place[0] = route.anchor;
  for (int k = 0; k < n; ++k) {
    const auto& s = route.stops[k];
    depart[k + 1] = depart[k] + tt.seconds(place[k], s.location) + s.dwell_s;
    place[k + 1] = s.location;
  }
  const double old_completion = depart[n];
  if (n > 0 && std::isnan(completion_time(route, params, tt, now))) return best;

  for (int i = first; i <= n; ++i) {
    if (depart[i] + tt.seconds(place[i], req.origin) > pickup.deadline + kEps) continue;
    for (int j = i + 1; j <= n + 1; ++j) {
      auto stop_at = [&, i, j](int k) -> const Stop& {
        if (k == i) return pickup;
        if (k == j) return dropoff;
        return route.stops[k - (k > i) - (k > j)];
      };
      const double done = simulate(route, start, n + 2, stop_at, params, tt, nullptr);
      if (std::isnan(done)) continue;
      const double delta = done - old_completion;
      if (delta < best.delta_cost_s) {
        best.accepted = true;
        best.pickup_index = i;
        best.dropoff_index = j;
        best.delta_cost_s = delta;
      }
    }
  }
  return best;
}

Route apply_insertion(const Route& route, const TripRequest& req, int pickup_index,
                      int dropoff_index, const DispatchParams& params,
                      const geo::TravelTimeProvider& tt, double now) {
  const int n = static_cast<int>(route.stops.size());
  if (pickup_index < 0 || pickup_index > n || dropoff_index <= pickup_index ||
      dropoff_index > n + 1) {
    throw std::invalid_argument("insertion positions out of range");
  }
  const auto [pickup, dropoff] = stops_for(req, params, tt);
  Route out = route;
  out.stops.insert(out.stops.begin() + pickup_index, pickup);
  out.stops.insert(out.stops.begin() + dropoff_index, dropoff);
  if (!route.first_locked(now)) out.anchor_time = std::max(route.anchor_time, now);
  std::vector<double> arrivals(out.stops.size());
  const double done = simulate(
      out, out.anchor_time, static_cast<int>(out.stops.size()),
      [&](int k) -> const Stop& { return out.stops[k]; }, params, tt, arrivals.data());
  if (std::isnan(done)) throw std::logic_error("insertion produces an infeasible route");
  for (std::size_t k = 0; k < arrivals.size(); ++k) out.stops[k].planned_arrival = arrivals[k];
  return out;
}

InsertionResult dispatch(std::span<const Candidate> fleet, const TripRequest& req,
                         const DispatchParams& params, const geo::TravelTimeProvider& tt,
                         double now) {
  InsertionResult best;
  const bool metric = tt.mode() == geo::TravelTimeProvider::Mode::constant_speed;
  for (const auto& c : fleet) {
    const Route& r = *c.route;
    // Great-circle times obey the triangle inequality, so the direct leg from
    // the anchor bounds every pickup arrival from below.
    if (metric) {
      const double earliest = start_time(r, now) + tt.seconds(r.anchor, req.origin);
      if (earliest > req.request_time + params.max_wait_s + 1e-6) continue;
    }
    auto res = try_insert(r, req, params, tt, now);
    if (!res.accepted) continue;
    if (!best.accepted || res.delta_cost_s < best.delta_cost_s ||
        (res.delta_cost_s == best.delta_cost_s && c.vehicle_id < best.vehicle_id)) {
      best = res;
      best.vehicle_id = c.vehicle_id;
    }
  }
  return best;
}

}  // namespace rideshare::dispatch
