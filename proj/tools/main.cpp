#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "rideshare/cli/config.h"
#include "rideshare/cli/runner.h"
#include "rideshare/cli/solver_validation.h"
#include "rideshare/errors.h"

namespace fs = std::filesystem;
using namespace rideshare;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kMismatch = 3 };

void print_ingest(const demand::IngestReport& r) {
  std::cout << "rows " << r.rows << "\naccepted " << r.accepted << "\ndropped " << r.dropped()
            << "\n  bad_passengers " << r.bad_passengers << "\n  same_location "
            << r.same_location << "\n  outside_bbox " << r.outside_bbox << "\n  unparseable "
            << r.unparseable << '\n';
}

int cmd_run(const std::string& config_path, const std::string& out, bool force) {
  const auto cfg = cli::load_config(config_path);
  const auto scenario = cli::load_scenario(cfg);
  const fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
  const auto result = cli::run_scenario(cfg, scenario, dir, force);
  const auto& r = result.report;
  std::cout << "requests " << r.total_requests << " accepted " << r.accepted << " rejected "
            << r.rejected << " rejection_rate " << r.rejection_rate;
  if (r.mean_waiting_s) std::cout << " mean_wait_s " << *r.mean_waiting_s;
  std::cout << " mean_travel_s " << r.mean_vehicle_travel_s << '\n';
  if (cfg.mode == sim::Mode::fdr) std::cout << "ticks " << result.ticks.size() << '\n';
  std::cout << "wrote " << dir.string() << '\n';
  return kOk;
}

int cmd_matrix(const std::string& config_path, const std::vector<std::string>& modes,
               const std::vector<double>& factors, int jobs, const std::string& out, bool force) {
  const auto cfg = cli::load_config(config_path);
  const fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
  const auto rows = cli::run_matrix(cfg, modes, factors, jobs, dir, force);
  int failed = 0;
  for (const auto& row : rows) {
    if (!row.report) {
      ++failed;
      std::cerr << row.directory << ": " << row.error << '\n';
    }
  }
  cli::write_summary(std::cout, rows);
  return failed == 0 ? kOk : kRuntime;
}

int cmd_validate(int count, std::uint64_t seed, const std::string& dump_dir) {
  const auto report = cli::validate_solver(count, seed, dump_dir);
  std::cout << "instances " << report.count << "\nmismatches " << report.mismatches
            << "\nmax_deviation " << report.max_deviation << "\nseconds " << report.seconds
            << '\n';
  for (const auto& p : report.dumps) std::cout << "dumped " << p.string() << '\n';
  return report.mismatches == 0 ? kOk : kMismatch;
}

int cmd_ingest(const std::string& config_path) {
  const auto cfg = cli::load_config(config_path);
  const auto scenario = cli::load_scenario(cfg);
  print_ingest(scenario.ingest);
  std::cout << "areas " << scenario.grid.num_areas() << " (" << scenario.grid.n_rows << " x "
            << scenario.grid.n_cols << ")\nwindow " << scenario.start << " " << scenario.end
            << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ride-sharing fleet simulator with idle-vehicle repositioning"};
  app.require_subcommand(1);

  std::string config_path, out;
  bool force = false;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config_path, "Scenario config file")->required();
  run->add_option("--out", out, "Output directory (default: output_dir from the config)");
  run->add_flag("--force", force, "Write into a non-empty output directory");

  std::vector<std::string> modes;
  std::vector<double> factors;
  int jobs = 1;
  auto* matrix = app.add_subcommand("matrix", "Run a mode x fleet-factor sweep");
  matrix->add_option("--config", config_path, "Base scenario config file")->required();
  matrix->add_option("--modes", modes, "none, react, fdr, fdr-perfect, fdr-naive")
      ->required()
      ->delimiter(',');
  matrix->add_option("--factors", factors, "Fleet factors, e.g. 0.8,1.0,1.2")
      ->required()
      ->delimiter(',');
  matrix->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  matrix->add_option("--out", out, "Output directory (default: output_dir from the config)");
  matrix->add_flag("--force", force, "Write into a non-empty output directory");

  int count = 200;
  std::uint64_t seed = 1;
  std::string dump_dir = "solver_mismatches";
  auto* validate = app.add_subcommand("validate-solver", "Compare the MIP solver with enumeration");
  validate->add_option("--count", count, "Number of random instances")->check(CLI::NonNegativeNumber);
  validate->add_option("--seed", seed, "Instance generator seed");
  validate->add_option("--dump-dir", dump_dir, "Where mismatching instances are written");

  auto* ingest = app.add_subcommand("ingest-check", "Parse and filter the dataset, then report");
  ingest->add_option("--config", config_path, "Scenario config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out, force);
    if (*matrix) return cmd_matrix(config_path, modes, factors, jobs, out, force);
    if (*validate) return cmd_validate(count, seed, dump_dir);
    if (*ingest) return cmd_ingest(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
