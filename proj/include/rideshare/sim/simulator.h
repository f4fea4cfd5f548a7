#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "rideshare/demand/forecast.h"
#include "rideshare/dispatch/insertion.h"
#include "rideshare/metrics/kpi.h"
#include "rideshare/mip/linear_model.h"
#include "rideshare/reposition/fdr_model.h"
#include "rideshare/reposition/target_pool.h"

namespace rideshare::sim {

using geo::GeoPoint;

enum class Mode { none, react, fdr };
enum class ForecastKind { perfect, naive };
enum class Phase { idle, touring, repositioning };

const char* to_string(Mode mode);
const char* to_string(ForecastKind kind);
const char* to_string(Phase phase);

struct SimConfig {
  Mode mode = Mode::none;
  ForecastKind forecast = ForecastKind::perfect;
  int fleet_size = 0;
  dispatch::DispatchParams dispatch;
  reposition::RepositionParams reposition;
  mip::SolverConfig solver;
  // Replay window; the first warmup_s seconds are excluded from the report.
  double start = 0.0;
  double end = 0.0;
  double warmup_s = 21600.0;
  double position_update_s = 30.0;
  std::uint64_t seed = 1;
};

// Lower values are processed first among events at the same time.
enum class EventKind : int {
  stop_arrival = 0,
  stop_departure = 1,
  reposition_arrival = 2,
  position_update = 3,
  request_arrival = 4,
  reposition_tick = 5,
  sample = 6,
};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::request_arrival;
  std::int64_t seq = 0;
  int vehicle = -1;
  std::int64_t version = 0;  // vehicle plan version the event belongs to
  std::int64_t index = 0;    // request index, tick number or sample minute
};

struct VehicleRecord {
  int id = 0;
  Phase phase = Phase::idle;
  // Departure point, departure time and pending stops. For an idle vehicle
  // the anchor is where it waits and anchor_time when it became free.
  dispatch::Route route;
  // Repositioning leg.
  std::optional<GeoPoint> reposition_target;
  GeoPoint reposition_origin;
  double reposition_departure = 0.0;
  double reposition_arrival = 0.0;
  // Last position reported by a position update.
  GeoPoint reported_position;
  double cumulative_travel_s = 0.0;
  std::int64_t version = 0;
};

// Per-tick audit record of the repositioning planner.
struct TickRecord {
  double time = 0.0;
  mip::SolveStatus status = mip::SolveStatus::optimal;
  double objective = 0.0;
  int moved = 0;  // sum of x_ij
  double solve_ms = 0.0;
  int plan_size = 0;
  std::int64_t nodes = 0;
  bool skipped = false;
};

struct PhaseChange {
  int vehicle;
  Phase from;
  Phase to;
  double time;
};

// Discrete-event replay of a request stream against a fleet. Single-threaded
// and deterministic for a given config and seed.
class Simulator {
 public:
  // requests must be sorted by request_time; only those inside
  // [cfg.start, cfg.end) are replayed. Throws ConfigError on an inconsistent
  // configuration.
  Simulator(SimConfig cfg, std::vector<demand::TripRequest> requests, geo::Grid grid,
            geo::TravelTimeProvider tt);

  // Processes one event; false once the queue is empty.
  bool step();
  // Runs to completion, draining routes after the window closes.
  metrics::KpiReport run();

  [[nodiscard]] double clock() const { return clock_; }
  [[nodiscard]] const std::vector<VehicleRecord>& vehicles() const { return fleet_; }
  [[nodiscard]] const std::vector<TickRecord>& ticks() const { return ticks_; }
  [[nodiscard]] const metrics::KpiAccumulator& accumulator() const { return kpi_; }
  [[nodiscard]] const reposition::TargetPool& target_pool() const { return pool_; }
  [[nodiscard]] std::int64_t replayed() const { return replayed_; }
  [[nodiscard]] std::int64_t completed_dropoffs() const { return dropoffs_; }
  // Interpolated position of a vehicle at time t (t not before its current leg).
  [[nodiscard]] GeoPoint position(int vehicle, double t) const;

  std::function<void(const PhaseChange&)> on_phase_change;
  std::function<void(int vehicle, GeoPoint position, double time)> on_position;
  std::function<void(const TickRecord&)> on_tick;

 private:
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.kind != b.kind) return a.kind > b.kind;
      return a.seq > b.seq;
    }
  };

  void push(double time, EventKind kind, int vehicle = -1, std::int64_t index = 0);
  void set_phase(VehicleRecord& v, Phase phase);
  void schedule_route(VehicleRecord& v);
  dispatch::Route candidate_route(const VehicleRecord& v) const;
  std::vector<reposition::IdleVehicle> idle_vehicles() const;
  void start_reposition(VehicleRecord& v, GeoPoint target);
  void end_reposition_leg(VehicleRecord& v, double now);
  void place_fleet();

  void handle_request(const Event& ev);
  void handle_stop_arrival(const Event& ev);
  void handle_stop_departure(const Event& ev);
  void handle_reposition_arrival(const Event& ev);
  void handle_position_update(const Event& ev);
  void handle_reposition_tick(const Event& ev);
  void handle_sample(const Event& ev);

  SimConfig cfg_;
  std::vector<demand::TripRequest> requests_;
  geo::Grid grid_;
  geo::TravelTimeProvider tt_;
  geo::TravelTimeMatrix matrix_;
  std::vector<double> request_times_;
  std::vector<geo::AreaId> request_areas_;

  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::int64_t seq_ = 0;
  double clock_ = 0.0;
  std::vector<VehicleRecord> fleet_;
  demand::RequestHistory history_;
  reposition::TargetPool pool_;
  metrics::KpiAccumulator kpi_;
  std::vector<TickRecord> ticks_;
  std::int64_t replayed_ = 0;
  std::int64_t dropoffs_ = 0;
};

}  // namespace rideshare::sim
