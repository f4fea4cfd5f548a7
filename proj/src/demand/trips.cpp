#include "rideshare/demand/trips.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <istream>
#include <ostream>

namespace rideshare::demand {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_digits(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (const char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return parse_number(s, out);
}

bool inside(const geo::BoundingBox& box, GeoPoint p) {
  return p.lat >= box.min.lat && p.lat <= box.max.lat && p.lon >= box.min.lon &&
         p.lon <= box.max.lon;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

}  // namespace

std::optional<double> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.size() == 19 && text[4] == '-' && text[7] == '-' && text[10] == 'T' &&
      text[13] == ':' && text[16] == ':') {
    int y, mo, d, h, mi, s;
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), mo) ||
        !parse_digits(text.substr(8, 2), d) || !parse_digits(text.substr(11, 2), h) ||
        !parse_digits(text.substr(14, 2), mi) || !parse_digits(text.substr(17, 2), s)) {
      return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return static_cast<double>(days) * 86400.0 + h * 3600.0 + mi * 60.0 + s;
  }
  std::int64_t epoch = 0;
  if (!parse_number(text, epoch)) return std::nullopt;
  return static_cast<double>(epoch);
}

ParsedRequests parse_requests(std::istream& in, const FilterPolicy& filter) {
  ParsedRequests out;
  std::string line;
  if (!std::getline(in, line)) throw LoadError("trip file is empty");
  if (trim(line) != kTripHeader) {
    throw LoadError(std::string("trip file header must be ") + kTripHeader);
  }
  std::int64_t next_id = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++out.report.rows;
    const std::int64_t id = next_id++;
    std::string_view fields[6];
    std::string_view rest(line);
    int count = 0;
    while (count < 6) {
      const auto comma = rest.find(',');
      fields[count++] = rest.substr(0, comma);
      if (comma == std::string_view::npos) {
        rest = {};
        break;
      }
      rest.remove_prefix(comma + 1);
    }
    TripRequest r;
    r.id = id;
    const auto time = count == 6 && rest.empty() ? parse_timestamp(fields[0]) : std::nullopt;
    long long passengers = 0;
    if (!time || !parse_number(fields[1], r.origin.lat) || !parse_number(fields[2], r.origin.lon) ||
        !parse_number(fields[3], r.destination.lat) ||
        !parse_number(fields[4], r.destination.lon) || !parse_number(fields[5], passengers) ||
        !geo::valid(r.origin) || !geo::valid(r.destination)) {
      ++out.report.unparseable;
      continue;
    }
    r.request_time = *time;
    if (passengers < 1 || passengers > 1000000) {
      ++out.report.bad_passengers;
      continue;
    }
    r.passengers = static_cast<int>(passengers);
    if (r.origin == r.destination) {
      ++out.report.same_location;
      continue;
    }
    if (filter.sanity_bbox &&
        (!inside(*filter.sanity_bbox, r.origin) || !inside(*filter.sanity_bbox, r.destination))) {
      ++out.report.outside_bbox;
      continue;
    }
    out.requests.push_back(r);
  }
  std::stable_sort(out.requests.begin(), out.requests.end(),
                   [](const TripRequest& a, const TripRequest& b) {
                     return a.request_time < b.request_time;
                   });
  out.report.accepted = static_cast<std::int64_t>(out.requests.size());
  return out;
}

geo::BoundingBox expand(const geo::BoundingBox& box, double margin_m) {
  const double lat0 = 0.5 * (box.min.lat + box.max.lat) * std::numbers::pi / 180.0;
  const double dlat = margin_m / (geo::kEarthRadiusM * std::numbers::pi / 180.0);
  const double dlon = margin_m / (geo::kEarthRadiusM * std::numbers::pi / 180.0 * std::cos(lat0));
  return {{std::max(-90.0, box.min.lat - dlat), std::max(-180.0, box.min.lon - dlon)},
          {std::min(90.0, box.max.lat + dlat), std::min(180.0, box.max.lon + dlon)}};
}

geo::BoundingBox derive_bbox(std::span<const TripRequest> requests) {
  if (requests.empty()) throw ConfigError("cannot derive a bounding box without requests");
  geo::BoundingBox b{requests[0].origin, requests[0].origin};
  for (const auto& r : requests) {
    for (const auto& p : {r.origin, r.destination}) {
      b.min.lat = std::min(b.min.lat, p.lat);
      b.min.lon = std::min(b.min.lon, p.lon);
      b.max.lat = std::max(b.max.lat, p.lat);
      b.max.lon = std::max(b.max.lon, p.lon);
    }
  }
  return b;
}

void write_requests(std::ostream& out, std::span<const TripRequest> requests) {
  out << kTripHeader << '\n';
  for (const auto& r : requests) {
    out << static_cast<std::int64_t>(r.request_time) << ',' << format_double(r.origin.lat) << ','
        << format_double(r.origin.lon) << ',' << format_double(r.destination.lat) << ','
        << format_double(r.destination.lon) << ',' << r.passengers << '\n';
  }
}

}  // namespace rideshare::demand
