#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "rideshare/dispatch/insertion.h"
#include "rideshare/geo/grid.h"
#include "rideshare/mip/linear_model.h"
#include "rideshare/reposition/fdr_model.h"
#include "rideshare/sim/simulator.h"

namespace rideshare::cli {

struct ScenarioConfig {
  std::string dataset;
  std::optional<geo::BoundingBox> bbox;  // derived from the data when absent
  double cell_size_m = 1000.0;
  double speed_mps = geo::kDefaultSpeedMps;
  std::string matrix;  // area travel-time CSV; empty for constant speed
  int fleet_size = 0;  // base count before the factor
  double vehicle_factor = 1.0;
  // dispatch.max_wait_s and reposition.coverage_s are the same value (t^c).
  dispatch::DispatchParams dispatch;
  reposition::RepositionParams reposition;
  sim::Mode mode = sim::Mode::none;
  std::optional<sim::ForecastKind> forecast;
  double warmup_s = 21600.0;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::optional<double> sim_start;
  std::optional<double> sim_end;
  double position_update_s = 30.0;
  double solver_time_limit_s = 30.0;
  std::int64_t solver_node_limit = 100000;
  double sanity_margin_m = 5000.0;

  [[nodiscard]] int fleet() const;

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);
};

// `key = value` lines with `#` comments. Applies defaults and validates;
// throws ConfigError naming the offending key. Does not touch the file system.
ScenarioConfig parse_config(std::istream& in);

// parse_config on a file; relative paths resolve against the file's
// directory and referenced files must exist.
ScenarioConfig load_config(const std::filesystem::path& path);

// Every key with its resolved value, in a form parse_config reads back to an
// identical config.
void write_config(std::ostream& out, const ScenarioConfig& cfg);

sim::Mode parse_mode(std::string_view text);
sim::ForecastKind parse_forecast(std::string_view text);

}  // namespace rideshare::cli
