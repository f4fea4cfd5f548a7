#pragma once

#include <deque>
#include <span>
#include <vector>

#include "rideshare/demand/trips.h"

namespace rideshare::demand {

struct DemandForecast {
  std::vector<double> values;  // forecast requests per area over the horizon
  double horizon_s = 0.0;
  double issued_at = 0.0;
};

// Observed (time, origin area) pairs in arrival order.
class RequestHistory {
 public:
  struct Observation {
    double time;
    geo::AreaId area;
  };

  // Times must be non-decreasing.
  void record(double time, geo::AreaId area);
  // Drops observations strictly older than cutoff.
  void evict_before(double cutoff);

  [[nodiscard]] const std::deque<Observation>& observations() const { return items_; }

 private:
  std::deque<Observation> items_;
};

// Requests observed in [now - h, now) per area.
DemandForecast naive_forecast(const RequestHistory& history, int num_areas, double now, double h);

// Requests in [now, now + h) per area. times must be sorted and areas[k] is
// the origin area of the request at times[k].
DemandForecast perfect_forecast(std::span<const double> times, std::span<const geo::AreaId> areas,
                                int num_areas, double now, double h);

DemandForecast perfect_forecast(std::span<const TripRequest> future, const geo::Grid& grid,
                                double now, double h);

}  // namespace rideshare::demand
