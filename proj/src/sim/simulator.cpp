#include "rideshare/sim/simulator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rideshare/errors.h"
#include "rideshare/reposition/planner.h"

namespace rideshare::sim {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::none: return "none";
    case Mode::react: return "react";
    case Mode::fdr: return "fdr";
  }
  return "none";
}

const char* to_string(ForecastKind kind) {
  return kind == ForecastKind::perfect ? "perfect" : "naive";
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::idle: return "idle";
    case Phase::touring: return "touring";
    case Phase::repositioning: return "repositioning";
  }
  return "idle";
}

Simulator::Simulator(SimConfig cfg, std::vector<demand::TripRequest> requests, geo::Grid grid,
                     geo::TravelTimeProvider tt)
    : cfg_(std::move(cfg)),
      grid_(std::move(grid)),
      tt_(std::move(tt)),
      pool_(grid_.num_areas()),
      kpi_(cfg_.start + cfg_.warmup_s, cfg_.end, cfg_.fleet_size) {
  if (cfg_.fleet_size < 0) throw ConfigError("fleet size must be non-negative");
  if (!(cfg_.end > cfg_.start)) throw ConfigError("simulation end must be after its start");
  if (!(cfg_.warmup_s >= 0.0)) throw ConfigError("warmup_s must be non-negative");
  if (!(cfg_.position_update_s > 0.0)) throw ConfigError("position_update_s must be positive");
  if (cfg_.dispatch.capacity < 1) throw ConfigError("capacity must be at least 1");
  if (!(cfg_.dispatch.max_wait_s > 0.0)) throw ConfigError("max_wait_s must be positive");
  if (!(cfg_.dispatch.ride_factor >= 1.0)) throw ConfigError("ride_factor must be at least 1");
  if (!(cfg_.dispatch.ride_buffer_s >= 0.0)) throw ConfigError("ride_buffer_s must be non-negative");
  if (!(cfg_.dispatch.dwell_s >= 0.0)) throw ConfigError("dwell_s must be non-negative");
  cfg_.reposition.validate();
  if (!std::is_sorted(requests.begin(), requests.end(), [](const auto& a, const auto& b) {
        return a.request_time < b.request_time;
      })) {
    throw ConfigError("requests must be sorted by request time");
  }
  for (auto& r : requests) {
    if (r.request_time >= cfg_.start && r.request_time < cfg_.end) {
      requests_.push_back(std::move(r));
    }
  }
  if (cfg_.mode == Mode::fdr) {
    matrix_ = geo::build_area_matrix(grid_, tt_);
    for (const auto& r : requests_) {
      request_times_.push_back(r.request_time);
      request_areas_.push_back(geo::locate(grid_, r.origin));
    }
  }

  place_fleet();
  clock_ = cfg_.start;
  if (!requests_.empty()) push(requests_[0].request_time, EventKind::request_arrival, -1, 0);
  push(cfg_.start, EventKind::position_update);
  if (cfg_.mode == Mode::fdr) push(cfg_.start, EventKind::reposition_tick, -1, 0);
  if (kpi_.num_minutes() > 0) push(kpi_.minute_start(0), EventKind::sample, -1, 0);
}

void Simulator::place_fleet() {
  // Uniform over the origins of the first hour; the whole stream or the grid
  // center when that is empty.
  std::vector<GeoPoint> origins;
  for (const auto& r : requests_) {
    if (r.request_time >= cfg_.start + 3600.0) break;
    origins.push_back(r.origin);
  }
  if (origins.empty()) {
    for (const auto& r : requests_) origins.push_back(r.origin);
  }
  if (origins.empty()) {
    origins.push_back(geo::unproject(grid_, {grid_.width_m() / 2.0, grid_.height_m() / 2.0}));
  }
  std::mt19937_64 rng(cfg_.seed);
  std::uniform_int_distribution<std::size_t> pick(0, origins.size() - 1);
  fleet_.resize(cfg_.fleet_size);
  for (int id = 0; id < cfg_.fleet_size; ++id) {
    auto& v = fleet_[id];
    v.id = id;
    v.route.anchor = origins[pick(rng)];
    v.route.anchor_time = cfg_.start;
    v.reported_position = v.route.anchor;
  }
}

void Simulator::push(double time, EventKind kind, int vehicle, std::int64_t index) {
  Event ev;
  ev.time = time;
  ev.kind = kind;
  ev.seq = seq_++;
  ev.vehicle = vehicle;
  ev.version = vehicle >= 0 ? fleet_[vehicle].version : 0;
  ev.index = index;
  queue_.push(ev);
}

void Simulator::set_phase(VehicleRecord& v, Phase phase) {
  if (v.phase == phase) return;
  const Phase from = v.phase;
  v.phase = phase;
  if (on_phase_change) on_phase_change({v.id, from, phase, clock_});
}

GeoPoint Simulator::position(int vehicle, double t) const {
  const auto& v = fleet_[vehicle];
  auto lerp = [&](GeoPoint a, GeoPoint b, double t0, double t1) {
    if (!(t1 > t0) || t <= t0) return a;
    if (t >= t1) return b;
    const double f = (t - t0) / (t1 - t0);
    const auto pa = geo::project(grid_, a);
    const auto pb = geo::project(grid_, b);
    return geo::unproject(grid_, {pa.x + f * (pb.x - pa.x), pa.y + f * (pb.y - pa.y)});
  };
  switch (v.phase) {
    case Phase::idle: return v.route.anchor;
    case Phase::repositioning:
      return lerp(v.reposition_origin, *v.reposition_target, v.reposition_departure,
                  v.reposition_arrival);
    case Phase::touring:
      if (v.route.stops.empty()) return v.route.anchor;
      return lerp(v.route.anchor, v.route.stops[0].location, v.route.anchor_time,
                  v.route.stops[0].planned_arrival);
  }
  return v.route.anchor;
}

dispatch::Route Simulator::candidate_route(const VehicleRecord& v) const {
  if (v.phase != Phase::repositioning) return v.route;
  dispatch::Route r;
  r.anchor = position(v.id, clock_);
  r.anchor_time = clock_;
  return r;
}

std::vector<reposition::IdleVehicle> Simulator::idle_vehicles() const {
  std::vector<reposition::IdleVehicle> idle;
  for (const auto& v : fleet_) {
    if (v.phase == Phase::idle) {
      idle.push_back({v.id, v.route.anchor, geo::locate(grid_, v.route.anchor)});
    }
  }
  return idle;
}

// After a route change: wait out a dwell, or head for the first stop.
void Simulator::schedule_route(VehicleRecord& v) {
  if (v.route.anchor_time > clock_) {
    push(v.route.anchor_time, EventKind::stop_departure, v.id);
  } else if (!v.route.stops.empty()) {
    push(v.route.stops[0].planned_arrival, EventKind::stop_arrival, v.id);
  } else {
    set_phase(v, Phase::idle);
  }
}

void Simulator::start_reposition(VehicleRecord& v, GeoPoint target) {
  v.reposition_origin = v.route.anchor;
  v.reposition_target = target;
  v.reposition_departure = clock_;
  v.reposition_arrival = clock_ + tt_.seconds(v.route.anchor, target);
  ++v.version;
  set_phase(v, Phase::repositioning);
  push(v.reposition_arrival, EventKind::reposition_arrival, v.id);
}

void Simulator::end_reposition_leg(VehicleRecord& v, double now) {
  const GeoPoint here = now >= v.reposition_arrival ? *v.reposition_target : position(v.id, now);
  kpi_.record_travel(v.reposition_departure, now, true);
  v.cumulative_travel_s += now - v.reposition_departure;
  v.reposition_target.reset();
  v.route = dispatch::Route{};
  v.route.anchor = here;
  v.route.anchor_time = now;
  ++v.version;
}

bool Simulator::step() {
  if (queue_.empty()) return false;
  const Event ev = queue_.top();
  queue_.pop();
  if (ev.time < clock_) throw std::logic_error("event queue went back in time");
  clock_ = ev.time;
  if (ev.vehicle >= 0 && ev.version != fleet_[ev.vehicle].version) return true;
  switch (ev.kind) {
    case EventKind::request_arrival: handle_request(ev); break;
    case EventKind::stop_arrival: handle_stop_arrival(ev); break;
    case EventKind::stop_departure: handle_stop_departure(ev); break;
    case EventKind::reposition_arrival: handle_reposition_arrival(ev); break;
    case EventKind::position_update: handle_position_update(ev); break;
    case EventKind::reposition_tick: handle_reposition_tick(ev); break;
    case EventKind::sample: handle_sample(ev); break;
  }
  return true;
}

metrics::KpiReport Simulator::run() {
  while (step()) {
  }
  return kpi_.finalize();
}

void Simulator::handle_request(const Event& ev) {
  const auto k = static_cast<std::size_t>(ev.index);
  const auto& req = requests_[k];
  ++replayed_;
  history_.record(req.request_time, geo::locate(grid_, req.origin));
  pool_.add(grid_, req.origin);

  std::vector<dispatch::Route> detached;
  detached.reserve(fleet_.size());
  std::vector<dispatch::Candidate> candidates;
  candidates.reserve(fleet_.size());
  for (const auto& v : fleet_) {
    if (v.phase == Phase::repositioning) {
      detached.push_back(candidate_route(v));
      candidates.push_back({v.id, &detached.back()});
    } else {
      candidates.push_back({v.id, &v.route});
    }
  }
  const auto res = dispatch::dispatch(candidates, req, cfg_.dispatch, tt_, clock_);
  kpi_.record_outcome(req.id, req.request_time, res.accepted);
  if (res.accepted) {
    auto& v = fleet_[res.vehicle_id];
    if (v.phase == Phase::repositioning) end_reposition_leg(v, clock_);
    v.route = dispatch::apply_insertion(v.route, req, res.pickup_index, res.dropoff_index,
                                        cfg_.dispatch, tt_, clock_);
    ++v.version;
    set_phase(v, Phase::touring);
    schedule_route(v);
  } else if (cfg_.mode == Mode::react) {
    const auto idle = idle_vehicles();
    const auto plan = reposition::react_on_rejection(req, idle, grid_, tt_);
    for (const auto& a : plan.assignments) start_reposition(fleet_[a.vehicle_id], a.target);
  }
  if (k + 1 < requests_.size()) {
    push(requests_[k + 1].request_time, EventKind::request_arrival, -1,
         static_cast<std::int64_t>(k + 1));
  }
}

void Simulator::handle_stop_arrival(const Event& ev) {
  auto& v = fleet_[ev.vehicle];
  auto& route = v.route;
  const dispatch::Stop stop = route.stops.front();
  kpi_.record_travel(route.anchor_time, clock_, false);
  v.cumulative_travel_s += clock_ - route.anchor_time;
  route.stops.erase(route.stops.begin());
  if (stop.kind == dispatch::Stop::Kind::pickup) {
    kpi_.record_pickup(stop.request_id, clock_);
    route.onboard += stop.passengers;
    for (auto& s : route.stops) {
      if (s.kind == dispatch::Stop::Kind::dropoff && s.request_id == stop.request_id) {
        s.pickup_departure = clock_ + stop.dwell_s;
      }
    }
  } else {
    route.onboard -= stop.passengers;
    ++dropoffs_;
  }
  route.anchor = stop.location;
  route.anchor_time = clock_ + stop.dwell_s;
  push(route.anchor_time, EventKind::stop_departure, v.id);
}

void Simulator::handle_stop_departure(const Event& ev) {
  auto& v = fleet_[ev.vehicle];
  if (v.route.stops.empty()) {
    set_phase(v, Phase::idle);
    return;
  }
  push(v.route.stops[0].planned_arrival, EventKind::stop_arrival, v.id);
}

void Simulator::handle_reposition_arrival(const Event& ev) {
  auto& v = fleet_[ev.vehicle];
  end_reposition_leg(v, clock_);
  set_phase(v, Phase::idle);
}

void Simulator::handle_position_update(const Event&) {
  for (auto& v : fleet_) {
    v.reported_position = position(v.id, clock_);
    if (on_position && v.phase != Phase::idle) on_position(v.id, v.reported_position, clock_);
  }
  const double next = clock_ + cfg_.position_update_s;
  if (next < cfg_.end) push(next, EventKind::position_update);
}

void Simulator::handle_reposition_tick(const Event& ev) {
  const int n = grid_.num_areas();
  const auto& params = cfg_.reposition;
  reposition::FleetSnapshot snap;
  snap.time = clock_;
  snap.idle = idle_vehicles();
  snap.touring.assign(n, 0);
  snap.repositioning.assign(n, 0);
  for (const auto& v : fleet_) {
    if (v.phase == Phase::touring) ++snap.touring[geo::locate(grid_, v.reported_position)];
    if (v.phase == Phase::repositioning) {
      ++snap.repositioning[geo::locate(grid_, *v.reposition_target)];
    }
  }
  demand::DemandForecast forecast;
  if (cfg_.forecast == ForecastKind::perfect) {
    forecast = demand::perfect_forecast(request_times_, request_areas_, n, clock_,
                                        params.horizon_s);
  } else {
    history_.evict_before(clock_ - params.horizon_s);
    forecast = demand::naive_forecast(history_, n, clock_, params.horizon_s);
  }
  const auto plan = reposition::plan_fdr(snap, forecast, matrix_, params,
                                         reposition::make_inputs(pool_), pool_, tt_,
                                         mix_seed(cfg_.seed, static_cast<std::uint64_t>(ev.index)),
                                         cfg_.solver);
  for (const auto& a : plan.assignments) start_reposition(fleet_[a.vehicle_id], a.target);

  TickRecord rec;
  rec.time = clock_;
  rec.status = plan.status;
  rec.objective = plan.objective;
  for (const auto& m : plan.moves) rec.moved += m.count;
  rec.solve_ms = plan.solve_ms;
  rec.plan_size = static_cast<int>(plan.assignments.size());
  rec.nodes = plan.nodes;
  rec.skipped = plan.skipped;
  ticks_.push_back(rec);
  if (on_tick) on_tick(rec);

  const double next = cfg_.start + static_cast<double>(ev.index + 1) * params.interval_s;
  if (next < cfg_.end) push(next, EventKind::reposition_tick, -1, ev.index + 1);
}

void Simulator::handle_sample(const Event& ev) {
  int idle = 0;
  int touring = 0;
  int repositioning = 0;
  for (const auto& v : fleet_) {
    switch (v.phase) {
      case Phase::idle: ++idle; break;
      case Phase::touring: ++touring; break;
      case Phase::repositioning: ++repositioning; break;
    }
  }
  kpi_.record_sample(ev.index, idle, touring, repositioning);
  if (ev.index + 1 < kpi_.num_minutes()) {
    push(kpi_.minute_start(ev.index + 1), EventKind::sample, -1, ev.index + 1);
  }
}

}  // namespace rideshare::sim
