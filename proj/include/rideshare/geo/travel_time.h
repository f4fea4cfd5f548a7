#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "rideshare/geo/grid.h"

namespace rideshare::geo {

inline constexpr double kDefaultSpeedMps = 8.33;

// Seconds between area centers, row-major by (origin, destination).
class TravelTimeMatrix {
 public:
  TravelTimeMatrix() = default;
  explicit TravelTimeMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n) * n, 0.0) {}

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] double at(AreaId i, AreaId j) const {
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }
  void set(AreaId i, AreaId j, double seconds) {
    entries_[static_cast<std::size_t>(i) * n_ + j] = seconds;
  }
  [[nodiscard]] const double* row(AreaId i) const {
    return entries_.data() + static_cast<std::size_t>(i) * n_;
  }

 private:
  int n_ = 0;
  std::vector<double> entries_;
};

// CSV with header from_area,to_area,seconds. Every ordered pair of distinct
// areas must be present; diagonal rows are optional and must be zero.
TravelTimeMatrix read_matrix_csv(std::istream& in, int num_areas);

// Point-to-point travel times. In constant-speed mode: great-circle distance
// over speed. In matrix mode: the entry for the two points' areas, with
// same-area trips falling back to great-circle distance over speed.
class TravelTimeProvider {
 public:
  enum class Mode { constant_speed, matrix };

  static TravelTimeProvider constant_speed(double speed_mps = kDefaultSpeedMps);
  static TravelTimeProvider from_matrix(const Grid& grid, TravelTimeMatrix matrix,
                                        double speed_mps = kDefaultSpeedMps);

  [[nodiscard]] double seconds(GeoPoint a, GeoPoint b) const;
  [[nodiscard]] Mode mode() const { return mode_; }
  [[nodiscard]] double speed_mps() const { return speed_; }
  // Present only in matrix mode.
  [[nodiscard]] const TravelTimeMatrix* matrix() const { return matrix_.get(); }

 private:
  Mode mode_ = Mode::constant_speed;
  double speed_ = kDefaultSpeedMps;
  Grid grid_;
  std::shared_ptr<const TravelTimeMatrix> matrix_;
};

TravelTimeMatrix build_area_matrix(const Grid& grid, const TravelTimeProvider& tt);

}  // namespace rideshare::geo
