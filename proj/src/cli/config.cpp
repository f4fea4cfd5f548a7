#include "rideshare/cli/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "rideshare/demand/trips.h"
#include "rideshare/errors.h"

namespace rideshare::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

double to_double(const std::string& key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    fail(key, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, std::string_view text) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

double to_time(const std::string& key, std::string_view text) {
  const auto t = demand::parse_timestamp(text);
  if (!t) fail(key, "expected epoch seconds or YYYY-MM-DDTHH:MM:SS, got '" + std::string(text) + "'");
  return *t;
}

geo::BoundingBox to_bbox(const std::string& key, std::string_view text) {
  std::vector<double> parts;
  while (true) {
    const auto comma = text.find(',');
    parts.push_back(to_double(key, trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (parts.size() != 4) fail(key, "expected min_lat,min_lon,max_lat,max_lon");
  geo::BoundingBox box{{parts[0], parts[1]}, {parts[2], parts[3]}};
  if (!geo::valid(box.min) || !geo::valid(box.max)) fail(key, "coordinates out of range");
  if (!(box.min.lat < box.max.lat) || !(box.min.lon < box.max.lon)) {
    fail(key, "corners must satisfy min < max with non-zero area");
  }
  return box;
}

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void require(bool ok, const char* key, const char* rule) {
  if (!ok) fail(key, std::string("must be ") + rule);
}

void validate(const ScenarioConfig& c, const std::set<std::string>& seen) {
  if (!seen.count("dataset")) fail("dataset", "required");
  if (c.dataset.empty()) fail("dataset", "must not be empty");
  if (!seen.count("fleet_size")) fail("fleet_size", "required");
  require(c.fleet_size >= 0, "fleet_size", "non-negative");
  require(c.vehicle_factor > 0, "vehicle_factor", "positive");
  require(c.cell_size_m > 0, "cell_size_m", "positive");
  require(c.speed_mps > 0, "speed_mps", "positive");
  require(c.dispatch.capacity >= 1, "capacity", "at least 1");
  require(c.dispatch.max_wait_s > 0, "max_wait_s", "positive");
  require(c.dispatch.ride_factor >= 1, "ride_factor", "at least 1");
  require(c.dispatch.ride_buffer_s >= 0, "ride_buffer_s", "non-negative");
  require(c.dispatch.dwell_s >= 0, "dwell_s", "non-negative");
  require(c.warmup_s >= 0, "warmup_s", "non-negative");
  require(c.position_update_s > 0, "position_update_s", "positive");
  require(c.solver_time_limit_s > 0, "solver_time_limit_s", "positive");
  require(c.solver_node_limit >= 1, "solver_node_limit", "at least 1");
  require(c.sanity_margin_m >= 0, "sanity_margin_m", "non-negative");
  if (c.sim_start && c.sim_end && !(*c.sim_end > *c.sim_start)) fail("sim_end", "must be after sim_start");
  if (c.mode == sim::Mode::fdr && !c.forecast) fail("forecast", "required when mode = fdr");
  const double max_fleet = c.fleet_size * c.vehicle_factor;
  require(max_fleet < 1e7, "vehicle_factor", "small enough to keep the fleet below 10 million");
  c.reposition.validate();
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dataset", [](auto& c, auto&, auto v) { c.dataset = std::string(v); }},
      {"bbox", [](auto& c, auto& k, auto v) { c.bbox = to_bbox(k, v); }},
      {"cell_size_m", [](auto& c, auto& k, auto v) { c.cell_size_m = to_double(k, v); }},
      {"speed_mps", [](auto& c, auto& k, auto v) { c.speed_mps = to_double(k, v); }},
      {"matrix", [](auto& c, auto&, auto v) { c.matrix = std::string(v); }},
      {"fleet_size", [](auto& c, auto& k, auto v) { c.fleet_size = to_integer<int>(k, v); }},
      {"vehicle_factor", [](auto& c, auto& k, auto v) { c.vehicle_factor = to_double(k, v); }},
      {"capacity", [](auto& c, auto& k, auto v) { c.dispatch.capacity = to_integer<int>(k, v); }},
      {"max_wait_s",
       [](auto& c, auto& k, auto v) {
         c.dispatch.max_wait_s = to_double(k, v);
         c.reposition.coverage_s = c.dispatch.max_wait_s;
       }},
      {"ride_factor", [](auto& c, auto& k, auto v) { c.dispatch.ride_factor = to_double(k, v); }},
      {"ride_buffer_s", [](auto& c, auto& k, auto v) { c.dispatch.ride_buffer_s = to_double(k, v); }},
      {"dwell_s", [](auto& c, auto& k, auto v) { c.dispatch.dwell_s = to_double(k, v); }},
      {"horizon_s", [](auto& c, auto& k, auto v) { c.reposition.horizon_s = to_double(k, v); }},
      {"interval_s", [](auto& c, auto& k, auto v) { c.reposition.interval_s = to_double(k, v); }},
      {"productivity", [](auto& c, auto& k, auto v) { c.reposition.productivity = to_double(k, v); }},
      {"touring_weight",
       [](auto& c, auto& k, auto v) { c.reposition.touring_weight = to_double(k, v); }},
      {"coverage_time_weight",
       [](auto& c, auto& k, auto v) { c.reposition.coverage_time_weight = to_double(k, v); }},
      {"w1", [](auto& c, auto& k, auto v) { c.reposition.w1 = to_double(k, v); }},
      {"w2", [](auto& c, auto& k, auto v) { c.reposition.w2 = to_double(k, v); }},
      {"mode",
       [](auto& c, auto& k, auto v) {
         try {
           c.mode = parse_mode(v);
         } catch (const ConfigError& e) {
           fail(k, e.what());
         }
       }},
      {"forecast",
       [](auto& c, auto& k, auto v) {
         try {
           c.forecast = parse_forecast(v);
         } catch (const ConfigError& e) {
           fail(k, e.what());
         }
       }},
      {"warmup_s", [](auto& c, auto& k, auto v) { c.warmup_s = to_double(k, v); }},
      {"seed", [](auto& c, auto& k, auto v) { c.seed = to_integer<std::uint64_t>(k, v); }},
      {"output_dir", [](auto& c, auto&, auto v) { c.output_dir = std::string(v); }},
      {"sim_start", [](auto& c, auto& k, auto v) { c.sim_start = to_time(k, v); }},
      {"sim_end", [](auto& c, auto& k, auto v) { c.sim_end = to_time(k, v); }},
      {"position_update_s",
       [](auto& c, auto& k, auto v) { c.position_update_s = to_double(k, v); }},
      {"solver_time_limit_s",
       [](auto& c, auto& k, auto v) { c.solver_time_limit_s = to_double(k, v); }},
      {"solver_node_limit",
       [](auto& c, auto& k, auto v) { c.solver_node_limit = to_integer<std::int64_t>(k, v); }},
      {"sanity_margin_m", [](auto& c, auto& k, auto v) { c.sanity_margin_m = to_double(k, v); }},
  };
  return table;
}

bool same_box(const std::optional<geo::BoundingBox>& a, const std::optional<geo::BoundingBox>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || (a->min == b->min && a->max == b->max);
}

}  // namespace

int ScenarioConfig::fleet() const {
  return static_cast<int>(std::llround(fleet_size * vehicle_factor));
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  const auto& da = a.dispatch;
  const auto& db = b.dispatch;
  const auto& ra = a.reposition;
  const auto& rb = b.reposition;
  return a.dataset == b.dataset && same_box(a.bbox, b.bbox) && a.cell_size_m == b.cell_size_m &&
         a.speed_mps == b.speed_mps && a.matrix == b.matrix && a.fleet_size == b.fleet_size &&
         a.vehicle_factor == b.vehicle_factor && da.capacity == db.capacity &&
         da.max_wait_s == db.max_wait_s && da.ride_factor == db.ride_factor &&
         da.ride_buffer_s == db.ride_buffer_s && da.dwell_s == db.dwell_s &&
         ra.horizon_s == rb.horizon_s && ra.interval_s == rb.interval_s &&
         ra.productivity == rb.productivity && ra.coverage_s == rb.coverage_s &&
         ra.touring_weight == rb.touring_weight &&
         ra.coverage_time_weight == rb.coverage_time_weight && ra.w1 == rb.w1 && ra.w2 == rb.w2 &&
         a.mode == b.mode && a.forecast == b.forecast && a.warmup_s == b.warmup_s &&
         a.seed == b.seed && a.output_dir == b.output_dir && a.sim_start == b.sim_start &&
         a.sim_end == b.sim_end && a.position_update_s == b.position_update_s &&
         a.solver_time_limit_s == b.solver_time_limit_s &&
         a.solver_node_limit == b.solver_node_limit && a.sanity_margin_m == b.sanity_margin_m;
}

sim::Mode parse_mode(std::string_view text) {
  if (text == "none") return sim::Mode::none;
  if (text == "react") return sim::Mode::react;
  if (text == "fdr") return sim::Mode::fdr;
  throw ConfigError("unknown mode '" + std::string(text) + "' (none, react, fdr)");
}

sim::ForecastKind parse_forecast(std::string_view text) {
  if (text == "perfect") return sim::ForecastKind::perfect;
  if (text == "naive") return sim::ForecastKind::naive;
  throw ConfigError("unknown forecast '" + std::string(text) + "' (perfect, naive)");
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(view.substr(0, eq)));
    const auto value = trim(view.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) fail(key, "unknown key");
    if (!seen.insert(key).second) fail(key, "set more than once");
    if (value.empty()) fail(key, "missing value");
    it->second(cfg, key, value);
  }
  validate(cfg, seen);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  auto cfg = parse_config(in);
  const auto base = std::filesystem::absolute(path).parent_path();
  auto resolve = [&](std::string& p, const char* key) {
    if (p.empty()) return;
    std::filesystem::path fp(p);
    if (fp.is_relative()) p = (base / fp).lexically_normal().string();
    if (!std::filesystem::is_regular_file(p)) fail(key, "file not found: " + p);
  };
  resolve(cfg.dataset, "dataset");
  resolve(cfg.matrix, "matrix");
  if (std::filesystem::path(cfg.output_dir).is_relative()) {
    cfg.output_dir = (base / cfg.output_dir).lexically_normal().string();
  }
  return cfg;
}

void write_config(std::ostream& out, const ScenarioConfig& c) {
  auto kv = [&](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  kv("dataset", c.dataset);
  if (c.bbox) {
    kv("bbox", number(c.bbox->min.lat) + "," + number(c.bbox->min.lon) + "," +
                   number(c.bbox->max.lat) + "," + number(c.bbox->max.lon));
  }
  kv("cell_size_m", number(c.cell_size_m));
  kv("speed_mps", number(c.speed_mps));
  if (!c.matrix.empty()) kv("matrix", c.matrix);
  kv("fleet_size", std::to_string(c.fleet_size));
  kv("vehicle_factor", number(c.vehicle_factor));
  kv("capacity", std::to_string(c.dispatch.capacity));
  kv("max_wait_s", number(c.dispatch.max_wait_s));
  kv("ride_factor", number(c.dispatch.ride_factor));
  kv("ride_buffer_s", number(c.dispatch.ride_buffer_s));
  kv("dwell_s", number(c.dispatch.dwell_s));
  kv("horizon_s", number(c.reposition.horizon_s));
  kv("interval_s", number(c.reposition.interval_s));
  kv("productivity", number(c.reposition.productivity));
  kv("touring_weight", number(c.reposition.touring_weight));
  kv("coverage_time_weight", number(c.reposition.coverage_time_weight));
  kv("w1", number(c.reposition.w1));
  kv("w2", number(c.reposition.w2));
  kv("mode", sim::to_string(c.mode));
  if (c.forecast) kv("forecast", sim::to_string(*c.forecast));
  kv("warmup_s", number(c.warmup_s));
  kv("seed", std::to_string(c.seed));
  kv("output_dir", c.output_dir);
  // Timestamps parse as whole epoch seconds.
  if (c.sim_start) kv("sim_start", std::to_string(std::llround(*c.sim_start)));
  if (c.sim_end) kv("sim_end", std::to_string(std::llround(*c.sim_end)));
  kv("position_update_s", number(c.position_update_s));
  kv("solver_time_limit_s", number(c.solver_time_limit_s));
  kv("solver_node_limit", std::to_string(c.solver_node_limit));
  kv("sanity_margin_m", number(c.sanity_margin_m));
}

}  // namespace rideshare::cli
