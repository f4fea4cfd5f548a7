#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "rideshare/geo/grid.h"

namespace rideshare::reposition {

using geo::AreaId;
using geo::GeoPoint;

// Distinct past pickup locations per area; the candidate repositioning
// targets.
class TargetPool {
 public:
  explicit TargetPool(int num_areas = 0) : points_(num_areas) {}

  // Adds p to the pool of its area unless the exact coordinates are already
  // present. Returns true if the pool grew.
  bool add(const geo::Grid& grid, GeoPoint p);

  [[nodiscard]] int num_areas() const { return static_cast<int>(points_.size()); }
  [[nodiscard]] const std::vector<GeoPoint>& points(AreaId a) const { return points_[a]; }
  [[nodiscard]] bool valid_target(AreaId a) const { return !points_[a].empty(); }
  [[nodiscard]] std::size_t total() const { return seen_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
      return std::hash<std::uint64_t>()(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
    }
  };
  std::vector<std::vector<GeoPoint>> points_;
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, KeyHash> seen_;
};

}  // namespace rideshare::reposition
