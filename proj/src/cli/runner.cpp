#include "rideshare/cli/runner.h"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rideshare/errors.h"

namespace rideshare::cli {

namespace fs = std::filesystem;

namespace {

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

Scenario load_scenario(const ScenarioConfig& cfg) {
  Scenario s;
  std::ifstream in(cfg.dataset, std::ios::binary);
  if (!in) throw LoadError("cannot open dataset " + cfg.dataset);
  demand::FilterPolicy filter;
  if (cfg.bbox) filter.sanity_bbox = demand::expand(*cfg.bbox, cfg.sanity_margin_m);
  auto parsed = demand::parse_requests(in, filter);
  s.requests = std::move(parsed.requests);
  s.ingest = parsed.report;

  const auto bbox = cfg.bbox ? *cfg.bbox : demand::derive_bbox(s.requests);
  s.grid = geo::build_grid(bbox, cfg.cell_size_m);
  if (cfg.matrix.empty()) {
    s.tt = geo::TravelTimeProvider::constant_speed(cfg.speed_mps);
  } else {
    std::ifstream min(cfg.matrix, std::ios::binary);
    if (!min) throw LoadError("cannot open travel-time matrix " + cfg.matrix);
    s.tt = geo::TravelTimeProvider::from_matrix(
        s.grid, geo::read_matrix_csv(min, s.grid.num_areas()), cfg.speed_mps);
  }

  if (s.requests.empty() && (!cfg.sim_start || !cfg.sim_end)) {
    throw ConfigError("sim_start: sim_start and sim_end are required for an empty dataset");
  }
  s.start = cfg.sim_start ? *cfg.sim_start
                          : std::floor(s.requests.front().request_time / 60.0) * 60.0;
  s.end = cfg.sim_end ? *cfg.sim_end
                      : std::floor(s.requests.back().request_time / 60.0) * 60.0 + 60.0;
  if (!(s.end > s.start)) throw ConfigError("sim_end: must be after sim_start");
  return s;
}

sim::SimConfig make_sim_config(const ScenarioConfig& cfg, const Scenario& scenario) {
  sim::SimConfig sc;
  sc.mode = cfg.mode;
  sc.forecast = cfg.forecast.value_or(sim::ForecastKind::perfect);
  sc.fleet_size = cfg.fleet();
  sc.dispatch = cfg.dispatch;
  sc.reposition = cfg.reposition;
  sc.reposition.coverage_s = cfg.dispatch.max_wait_s;
  sc.solver.time_limit_s = cfg.solver_time_limit_s;
  sc.solver.node_limit = cfg.solver_node_limit;
  sc.start = scenario.start;
  sc.end = scenario.end;
  sc.warmup_s = cfg.warmup_s;
  sc.position_update_s = cfg.position_update_s;
  sc.seed = cfg.seed;
  return sc;
}

void write_audit_line(std::ostream& out, const sim::TickRecord& t) {
  out << "{\"time\":" << number(t.time) << ",\"status\":\"" << mip::to_string(t.status)
      << "\",\"objective\":" << number(t.objective) << ",\"moved\":" << t.moved
      << ",\"solve_ms\":" << number(t.solve_ms) << ",\"plan_size\":" << t.plan_size
      << ",\"nodes\":" << t.nodes << ",\"skipped\":" << (t.skipped ? "true" : "false") << "}\n";
}

RunResult run_scenario(const ScenarioConfig& cfg, const Scenario& scenario,
                       const fs::path& out_dir, bool force) {
  if (fs::exists(out_dir)) {
    if (!fs::is_directory(out_dir)) {
      throw std::runtime_error(out_dir.string() + " exists and is not a directory");
    }
    if (!fs::is_empty(out_dir) && !force) {
      throw std::runtime_error("output directory " + out_dir.string() +
                               " is not empty (use --force to overwrite)");
    }
  }
  fs::create_directories(out_dir);

  auto echo = cfg;
  echo.output_dir = fs::absolute(out_dir).lexically_normal().string();
  {
    const auto path = out_dir / "config.resolved";
    auto out = open_output(path);
    write_config(out, echo);
    close_output(out, path);
  }

  sim::Simulator simulator(make_sim_config(cfg, scenario), scenario.requests, scenario.grid,
                           scenario.tt);
  const auto audit_path = out_dir / "audit.jsonl";
  std::ofstream audit;
  if (cfg.mode == sim::Mode::fdr) {
    audit = open_output(audit_path);
    simulator.on_tick = [&](const sim::TickRecord& t) { write_audit_line(audit, t); };
  } else {
    fs::remove(audit_path);
  }

  RunResult result;
  result.report = simulator.run();
  result.ticks = simulator.ticks();
  if (cfg.mode == sim::Mode::fdr) close_output(audit, audit_path);

  const std::pair<const char*, void (*)(const metrics::KpiReport&, std::ostream&)> writers[] = {
      {"kpi.json", metrics::write_json},
      {"kpi.csv", metrics::write_kpi_csv},
      {"timeseries.csv", metrics::write_timeseries_csv},
  };
  for (const auto& [name, write] : writers) {
    const auto path = out_dir / name;
    auto out = open_output(path);
    write(result.report, out);
    close_output(out, path);
  }
  return result;
}

std::vector<MatrixRow> run_matrix(const ScenarioConfig& base, const std::vector<std::string>& modes,
                                  const std::vector<double>& factors, int jobs,
                                  const fs::path& out_dir, bool force) {
  std::vector<MatrixRow> rows;
  std::vector<ScenarioConfig> configs;
  for (const auto& mode : modes) {
    ScenarioConfig cfg = base;
    std::string forecast;
    if (mode == "none" || mode == "react") {
      cfg.mode = parse_mode(mode);
      cfg.forecast.reset();
    } else if (mode == "fdr" || mode == "fdr-perfect" || mode == "fdr-naive") {
      cfg.mode = sim::Mode::fdr;
      if (mode == "fdr-perfect") cfg.forecast = sim::ForecastKind::perfect;
      if (mode == "fdr-naive") cfg.forecast = sim::ForecastKind::naive;
      if (!cfg.forecast) cfg.forecast = sim::ForecastKind::perfect;
      forecast = sim::to_string(*cfg.forecast);
    } else {
      throw ConfigError("modes: unknown mode '" + mode +
                        "' (none, react, fdr, fdr-perfect, fdr-naive)");
    }
    for (const double factor : factors) {
      if (!(factor > 0) || !std::isfinite(factor)) {
        throw ConfigError("factors: must be positive, got " + number(factor));
      }
      auto run_cfg = cfg;
      run_cfg.vehicle_factor = factor;
      MatrixRow row;
      row.mode = mode;
      row.forecast = forecast;
      row.factor = factor;
      row.fleet_size = run_cfg.fleet();
      row.directory = mode + "_f" + number(factor);
      run_cfg.output_dir = (out_dir / row.directory).string();
      rows.push_back(std::move(row));
      configs.push_back(std::move(run_cfg));
    }
  }

  if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !force) {
    throw std::runtime_error("output directory " + out_dir.string() +
                             " is not empty (use --force to overwrite)");
  }
  fs::create_directories(out_dir);
  const Scenario scenario = load_scenario(base);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      try {
        rows[k].report = run_scenario(configs[k], scenario, configs[k].output_dir, force).report;
      } catch (const std::exception& e) {
        rows[k].error = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const auto path = out_dir / "summary.csv";
  auto out = open_output(path);
  write_summary(out, rows);
  close_output(out, path);
  return rows;
}

void write_summary(std::ostream& out, const std::vector<MatrixRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.mode << ',' << r.forecast << ',' << number(r.factor) << ',' << r.fleet_size << ',';
    if (r.report) {
      out << "ok," << number(r.report->rejection_rate) << ',';
      if (r.report->mean_waiting_s) out << number(*r.report->mean_waiting_s);
      out << ',' << number(r.report->mean_vehicle_travel_s);
    } else {
      out << "failed,,,";
    }
    out << ',' << r.directory << '\n';
  }
}

}  // namespace rideshare::cli
