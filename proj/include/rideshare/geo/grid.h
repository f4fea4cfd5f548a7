#pragma once

#include "rideshare/errors.h"

namespace rideshare::geo {

inline constexpr double kEarthRadiusM = 6371008.8;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct BoundingBox {
  GeoPoint min;
  GeoPoint max;
};

using AreaId = int;

// Meters east and north of the grid's south-west corner.
struct Projected {
  double x = 0.0;
  double y = 0.0;
};

// Uniform cells over a bounding box. Area ids are row-major starting at the
// south-west cell. The last row and column may be cut short by the box edge.
struct Grid {
  BoundingBox bbox;
  double cell_size_m = 0.0;
  int n_rows = 0;
  int n_cols = 0;
  double m_per_deg_lat = 0.0;
  double m_per_deg_lon = 0.0;

  [[nodiscard]] int num_areas() const { return n_rows * n_cols; }
  [[nodiscard]] double width_m() const { return (bbox.max.lon - bbox.min.lon) * m_per_deg_lon; }
  [[nodiscard]] double height_m() const { return (bbox.max.lat - bbox.min.lat) * m_per_deg_lat; }
};

Grid build_grid(const BoundingBox& bbox, double cell_size_m);

Projected project(const Grid& grid, GeoPoint p);
GeoPoint unproject(const Grid& grid, Projected q);

// Points outside the box are clamped to the nearest boundary cell.
AreaId locate(const Grid& grid, GeoPoint p);

// Centroid of the cell clipped to the bounding box.
GeoPoint area_center(const Grid& grid, AreaId a);

// Haversine distance on a sphere of radius kEarthRadiusM.
double great_circle_m(GeoPoint a, GeoPoint b);

bool valid(GeoPoint p);

}  // namespace rideshare::geo
