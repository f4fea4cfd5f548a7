#include "rideshare/geo/travel_time.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <string>

namespace rideshare::geo {

namespace {

template <typename T>
bool parse_field(std::string_view s, T& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

TravelTimeMatrix read_matrix_csv(std::istream& in, int num_areas) {
  std::string line;
  if (!std::getline(in, line)) throw LoadError("travel-time matrix: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "from_area,to_area,seconds") {
    throw LoadError("travel-time matrix: expected header from_area,to_area,seconds");
  }
  TravelTimeMatrix m(num_areas);
  std::vector<char> seen(static_cast<std::size_t>(num_areas) * num_areas, 0);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    int from = -1, to = -1;
    double secs = 0.0;
    const std::string_view v(line);
    if (c2 == std::string::npos || !parse_field(v.substr(0, c1), from) ||
        !parse_field(v.substr(c1 + 1, c2 - c1 - 1), to) || !parse_field(v.substr(c2 + 1), secs)) {
      throw LoadError("travel-time matrix line " + std::to_string(line_no) + ": malformed row");
    }
    if (from < 0 || from >= num_areas || to < 0 || to >= num_areas) {
      throw LoadError("travel-time matrix line " + std::to_string(line_no) + ": area out of range");
    }
    if (!std::isfinite(secs) || secs < 0.0) {
      throw LoadError("travel-time matrix line " + std::to_string(line_no) +
                      ": seconds must be finite and non-negative");
    }
    if (from == to && secs != 0.0) {
      throw LoadError("travel-time matrix line " + std::to_string(line_no) +
                      ": diagonal entries must be zero");
    }
    m.set(from, to, secs);
    seen[static_cast<std::size_t>(from) * num_areas + to] = 1;
  }
  for (int i = 0; i < num_areas; ++i) {
    for (int j = 0; j < num_areas; ++j) {
      if (i != j && !seen[static_cast<std::size_t>(i) * num_areas + j]) {
        throw LoadError("travel-time matrix: missing pair " + std::to_string(i) + "," +
                        std::to_string(j));
      }
    }
  }
  return m;
}

TravelTimeProvider TravelTimeProvider::constant_speed(double speed_mps) {
  if (!(speed_mps > 0.0) || !std::isfinite(speed_mps)) {
    throw ConfigError("travel speed must be positive");
  }
  TravelTimeProvider p;
  p.mode_ = Mode::constant_speed;
  p.speed_ = speed_mps;
  return p;
}

TravelTimeProvider TravelTimeProvider::from_matrix(const Grid& grid, TravelTimeMatrix matrix,
                                                   double speed_mps) {
  if (matrix.size() != grid.num_areas()) {
    throw ConfigError("travel-time matrix size does not match the grid");
  }
  auto p = constant_speed(speed_mps);
  p.mode_ = Mode::matrix;
  p.grid_ = grid;
  p.matrix_ = std::make_shared<const TravelTimeMatrix>(std::move(matrix));
  return p;
}

double TravelTimeProvider::seconds(GeoPoint a, GeoPoint b) const {
  if (a == b) return 0.0;
  if (mode_ == Mode::matrix) {
    const AreaId i = locate(grid_, a);
    const AreaId j = locate(grid_, b);
    if (i != j) return matrix_->at(i, j);
  }
  return great_circle_m(a, b) / speed_;
}

TravelTimeMatrix build_area_matrix(const Grid& grid, const TravelTimeProvider& tt) {
  if (tt.matrix() != nullptr) {
    if (tt.matrix()->size() != grid.num_areas()) {
      throw ConfigError("travel-time matrix size does not match the grid");
    }
    return *tt.matrix();
  }
  const int n = grid.num_areas();
  std::vector<GeoPoint> centers(n);
  for (int a = 0; a < n; ++a) centers[a] = area_center(grid, a);
  TravelTimeMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m.set(i, j, i == j ? 0.0 : tt.seconds(centers[i], centers[j]));
  }
  return m;
}

}  // namespace rideshare::geo
