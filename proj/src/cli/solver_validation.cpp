#include "rideshare/cli/solver_validation.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "rideshare/mip/model_text.h"
#include "rideshare/mip/solver.h"

namespace rideshare::cli {

reposition::FdrModel random_fdr_instance(std::mt19937_64& rng) {
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  const int n = uniform_int(1, 4);
  reposition::RepositionParams params;
  params.coverage_s = uniform_int(6, 48) * 10.0;
  params.productivity = uniform_int(1, 8);
  params.touring_weight = uniform_int(1, 10) / 10.0;
  params.coverage_time_weight = 1.0 + uniform_int(0, 10) / 20.0;

  geo::TravelTimeMatrix t(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) t.set(i, j, uniform_int(3, 60) * 10.0);
    }
  }

  reposition::FleetSnapshot snap;
  snap.touring.resize(n);
  snap.repositioning.resize(n);
  int id = 0;
  for (int a = 0; a < n; ++a) {
    for (int k = uniform_int(0, 3); k > 0; --k) snap.idle.push_back({id++, {}, a});
    snap.touring[a] = uniform_int(0, 3);
    snap.repositioning[a] = uniform_int(0, 2);
  }

  demand::DemandForecast forecast;
  forecast.horizon_s = params.horizon_s;
  for (int a = 0; a < n; ++a) forecast.values.push_back(uniform_int(0, 3));

  reposition::FdrInputs inputs;
  for (int a = 0; a < n; ++a) inputs.valid_target.push_back(uniform(0.0, 1.0) < 0.8);

  return reposition::build_fdr_model(snap, forecast, t, params, inputs);
}

ValidationReport validate_solver(int count, std::uint64_t seed, const std::filesystem::path& dump_dir) {
  if (count < 0) throw std::invalid_argument("count must be non-negative");
  const auto t0 = std::chrono::steady_clock::now();
  ValidationReport report;
  report.count = count;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    const auto instance = random_fdr_instance(rng);
    const auto& model = instance.model;
    const auto mip = mip::solve_mip(model);
    const auto oracle = mip::brute_force_solve(model, std::int64_t{1} << 40);
    bool ok = mip.status == oracle.status;
    if (ok && oracle.status == mip::SolveStatus::optimal) {
      const double dev = std::abs(mip.objective - oracle.objective);
      report.max_deviation = std::max(report.max_deviation, dev);
      ok = dev <= kValidationTolerance;
    }
    if (!ok) {
      ++report.mismatches;
      std::filesystem::create_directories(dump_dir);
      const auto path = dump_dir / ("mismatch_" + std::to_string(seed) + "_" + std::to_string(k) + ".model");
      std::ofstream out(path);
      mip::write_model(out, model);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      report.dumps.push_back(path);
    }
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace rideshare::cli
