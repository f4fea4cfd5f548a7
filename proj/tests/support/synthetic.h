#pragma once

#include <cstdint>
#include <vector>

#include "rideshare/demand/trips.h"
#include "rideshare/geo/grid.h"

namespace rideshare::testing {

// A 10 km x 10 km square with two Gaussian demand clusters near opposite
// corners. With `alternate`, the busy cluster switches every period_s; without
// it both clusters keep the mean intensity.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  double start = 1'700'000'000.0;
  double duration_s = 24 * 3600.0;
  double busy_rate_per_h = 720.0;
  double quiet_rate_per_h = 80.0;
  double period_s = 7200.0;
  bool alternate = true;
  double cluster_sigma_m = 600.0;
  // Destinations scatter around either cluster with equal odds.
  double destination_sigma_m = 1200.0;
  double side_m = 10'000.0;
};

// A box of the given extent in meters, measured the way build_grid does.
geo::BoundingBox box_of_size(geo::GeoPoint south_west, double width_m, double height_m);

geo::BoundingBox synthetic_bbox(const SyntheticSpec& spec);
std::vector<demand::TripRequest> synthetic_requests(const SyntheticSpec& spec);

}  // namespace rideshare::testing
