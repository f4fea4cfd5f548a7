#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rideshare/geo/grid.h"

namespace rideshare::demand {

using geo::GeoPoint;

struct TripRequest {
  std::int64_t id = 0;
  double request_time = 0.0;  // seconds since the Unix epoch
  GeoPoint origin;
  GeoPoint destination;
  int passengers = 1;
};

struct FilterPolicy {
  // Requests with either endpoint outside this box are dropped. Without a box
  // only the coordinate-range check applies.
  std::optional<geo::BoundingBox> sanity_bbox;
};

struct IngestReport {
  std::int64_t rows = 0;
  std::int64_t accepted = 0;
  std::int64_t bad_passengers = 0;
  std::int64_t same_location = 0;
  std::int64_t outside_bbox = 0;
  std::int64_t unparseable = 0;

  [[nodiscard]] std::int64_t dropped() const {
    return bad_passengers + same_location + outside_bbox + unparseable;
  }
};

struct ParsedRequests {
  std::vector<TripRequest> requests;  // sorted by request_time, stable
  IngestReport report;
};

inline constexpr const char* kTripHeader =
    "request_time,pickup_lat,pickup_lon,dropoff_lat,dropoff_lon,passengers";

// Ids follow row order in the source. Throws LoadError on a wrong header.
ParsedRequests parse_requests(std::istream& in, const FilterPolicy& filter);

// YYYY-MM-DDTHH:MM:SS (UTC) or integer epoch seconds.
std::optional<double> parse_timestamp(std::string_view text);

// Box grown by margin_m on every side.
geo::BoundingBox expand(const geo::BoundingBox& box, double margin_m);

// Smallest box holding every origin and destination. Throws ConfigError when
// there are no requests.
geo::BoundingBox derive_bbox(std::span<const TripRequest> requests);

void write_requests(std::ostream& out, std::span<const TripRequest> requests);

}  // namespace rideshare::demand
