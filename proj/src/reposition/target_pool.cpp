#include "rideshare/reposition/target_pool.h"

#include <bit>

namespace rideshare::reposition {

bool TargetPool::add(const geo::Grid& grid, GeoPoint p) {
  // +0.0 and -0.0 compare equal as coordinates, so normalise before hashing bits.
  const double lat = p.lat == 0.0 ? 0.0 : p.lat;
  const double lon = p.lon == 0.0 ? 0.0 : p.lon;
  if (!seen_.emplace(std::bit_cast<std::uint64_t>(lat), std::bit_cast<std::uint64_t>(lon)).second) {
    return false;
  }
  points_[geo::locate(grid, p)].push_back(p);
  return true;
}

}  // namespace rideshare::reposition
