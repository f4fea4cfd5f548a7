#include "rideshare/demand/forecast.h"

#include <algorithm>
#include <stdexcept>

namespace rideshare::demand {

void RequestHistory::record(double time, geo::AreaId area) {
  if (!items_.empty() && time < items_.back().time) {
    throw std::invalid_argument("request history must be recorded in time order");
  }
  items_.push_back({time, area});
}

void RequestHistory::evict_before(double cutoff) {
  while (!items_.empty() && items_.front().time < cutoff) items_.pop_front();
}

DemandForecast naive_forecast(const RequestHistory& history, int num_areas, double now, double h) {
  DemandForecast f{std::vector<double>(num_areas, 0.0), h, now};
  const auto& obs = history.observations();
  auto first = std::lower_bound(obs.begin(), obs.end(), now - h,
                                [](const auto& o, double t) { return o.time < t; });
  for (auto it = first; it != obs.end() && it->time < now; ++it) f.values[it->area] += 1.0;
  return f;
}

DemandForecast perfect_forecast(std::span<const double> times, std::span<const geo::AreaId> areas,
                                int num_areas, double now, double h) {
  DemandForecast f{std::vector<double>(num_areas, 0.0), h, now};
  auto k = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), now) -
                                    times.begin());
  for (; k < times.size() && times[k] < now + h; ++k) f.values[areas[k]] += 1.0;
  return f;
}

DemandForecast perfect_forecast(std::span<const TripRequest> future, const geo::Grid& grid,
                                double now, double h) {
  DemandForecast f{std::vector<double>(grid.num_areas(), 0.0), h, now};
  auto it = std::lower_bound(future.begin(), future.end(), now,
                             [](const TripRequest& r, double t) { return r.request_time < t; });
  for (; it != future.end() && it->request_time < now + h; ++it) {
    f.values[geo::locate(grid, it->origin)] += 1.0;
  }
  return f;
}

}  // namespace rideshare::demand
