#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rideshare/cli/config.h"
#include "rideshare/demand/trips.h"
#include "rideshare/geo/travel_time.h"
#include "rideshare/metrics/kpi.h"
#include "rideshare/sim/simulator.h"

namespace rideshare::cli {

struct Scenario {
  std::vector<demand::TripRequest> requests;
  demand::IngestReport ingest;
  geo::Grid grid;
  geo::TravelTimeProvider tt;
  double start = 0.0;
  double end = 0.0;
};

// Parses and filters the dataset, builds the grid and travel times, and fixes
// the replay window.
Scenario load_scenario(const ScenarioConfig& cfg);

sim::SimConfig make_sim_config(const ScenarioConfig& cfg, const Scenario& scenario);

struct RunResult {
  metrics::KpiReport report;
  std::vector<sim::TickRecord> ticks;
};

// Runs one scenario and writes kpi.json, kpi.csv, timeseries.csv,
// config.resolved and, in fdr mode, audit.jsonl into out_dir. Refuses a
// non-empty out_dir unless force is set.
RunResult run_scenario(const ScenarioConfig& cfg, const Scenario& scenario,
                       const std::filesystem::path& out_dir, bool force);

void write_audit_line(std::ostream& out, const sim::TickRecord& tick);

// One matrix cell: a mode (none, react, fdr, fdr-perfect, fdr-naive) and a
// fleet factor.
struct MatrixRow {
  std::string mode;
  std::string forecast;  // empty outside fdr
  double factor = 1.0;
  int fleet_size = 0;
  std::string directory;
  std::optional<metrics::KpiReport> report;  // absent when the run failed
  std::string error;
};

inline constexpr const char* kSummaryHeader =
    "mode,forecast,factor,fleet_size,status,rejection_rate,mean_waiting_s,mean_vehicle_travel_s,"
    "directory";

// Cross product of modes and factors, one subdirectory per run under out_dir,
// plus summary.csv. Runs execute on up to `jobs` threads; a failed run is
// recorded and the rest continue.
std::vector<MatrixRow> run_matrix(const ScenarioConfig& base, const std::vector<std::string>& modes,
                                  const std::vector<double>& factors, int jobs,
                                  const std::filesystem::path& out_dir, bool force);

void write_summary(std::ostream& out, const std::vector<MatrixRow>& rows);

}  // namespace rideshare::cli
