#include "rideshare/geo/grid.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rideshare::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

int cell_count(double extent_m, double cell_size_m) {
  // Tolerate extents that are an exact multiple of the cell up to rounding.
  const double cells = extent_m / cell_size_m;
  return std::max(1, static_cast<int>(std::ceil(cells - 1e-9)));
}

}  // namespace

bool valid(GeoPoint p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

Grid build_grid(const BoundingBox& bbox, double cell_size_m) {
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) {
    throw ConfigError("grid cell size must be positive");
  }
  if (!valid(bbox.min) || !valid(bbox.max)) {
    throw ConfigError("bounding box corners must be valid coordinates");
  }
  if (bbox.min.lat > bbox.max.lat || bbox.min.lon > bbox.max.lon) {
    throw ConfigError("bounding box corners are not ordered");
  }
  if (bbox.min.lat == bbox.max.lat || bbox.min.lon == bbox.max.lon) {
    throw ConfigError("bounding box has zero area");
  }
  Grid g;
  g.bbox = bbox;
  g.cell_size_m = cell_size_m;
  const double lat0 = 0.5 * (bbox.min.lat + bbox.max.lat);
  g.m_per_deg_lat = kEarthRadiusM * kDegToRad;
  g.m_per_deg_lon = kEarthRadiusM * kDegToRad * std::cos(lat0 * kDegToRad);
  g.n_rows = cell_count(g.height_m(), cell_size_m);
  g.n_cols = cell_count(g.width_m(), cell_size_m);
  return g;
}

Projected project(const Grid& grid, GeoPoint p) {
  return {(p.lon - grid.bbox.min.lon) * grid.m_per_deg_lon,
          (p.lat - grid.bbox.min.lat) * grid.m_per_deg_lat};
}

GeoPoint unproject(const Grid& grid, Projected q) {
  return {grid.bbox.min.lat + q.y / grid.m_per_deg_lat,
          grid.bbox.min.lon + q.x / grid.m_per_deg_lon};
}

AreaId locate(const Grid& grid, GeoPoint p) {
  const auto q = project(grid, p);
  const int col = std::clamp(static_cast<int>(std::floor(q.x / grid.cell_size_m)), 0,
                             grid.n_cols - 1);
  const int row = std::clamp(static_cast<int>(std::floor(q.y / grid.cell_size_m)), 0,
                             grid.n_rows - 1);
  return row * grid.n_cols + col;
}

GeoPoint area_center(const Grid& grid, AreaId a) {
  if (a < 0 || a >= grid.num_areas()) {
    throw std::out_of_range("area id " + std::to_string(a) + " outside grid");
  }
  const int row = a / grid.n_cols;
  const int col = a % grid.n_cols;
  const double x0 = col * grid.cell_size_m;
  const double y0 = row * grid.cell_size_m;
  const double x1 = std::min(x0 + grid.cell_size_m, grid.width_m());
  const double y1 = std::min(y0 + grid.cell_size_m, grid.height_m());
  return unproject(grid, {0.5 * (x0 + x1), 0.5 * (y0 + y1)});
}

double great_circle_m(GeoPoint a, GeoPoint b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace rideshare::geo
