#include "rideshare/reposition/fdr_model.h"

#include <cmath>
#include <string>

#include "rideshare/errors.h"

namespace rideshare::reposition {

void RepositionParams::validate() const {
  auto require = [](bool ok, const char* name, const char* rule) {
    if (!ok) throw ConfigError(std::string(name) + " must be " + rule);
  };
  require(horizon_s > 0 && std::isfinite(horizon_s), "horizon_s", "positive");
  require(interval_s > 0 && std::isfinite(interval_s), "interval_s", "positive");
  require(productivity >= 1 && std::isfinite(productivity), "productivity", "at least 1");
  require(coverage_s > 0 && std::isfinite(coverage_s), "coverage_s", "positive");
  require(touring_weight > 0 && touring_weight <= 1, "touring_weight", "in (0, 1]");
  require(coverage_time_weight >= 1 && std::isfinite(coverage_time_weight),
          "coverage_time_weight", "at least 1");
  require(w2 >= 10 && std::isfinite(w2), "w2", "at least 10");
  require(w1 >= 100 * w2 && std::isfinite(w1), "w1", "at least 100 * w2");
}

std::vector<int> FleetSnapshot::idle_per_area() const {
  std::vector<int> counts(touring.size(), 0);
  for (const auto& v : idle) ++counts[v.area];
  return counts;
}

FdrInputs make_inputs(const TargetPool& pool) {
  FdrInputs in;
  in.valid_target.resize(pool.num_areas());
  for (int a = 0; a < pool.num_areas(); ++a) in.valid_target[a] = pool.valid_target(a);
  return in;
}

FdrModel build_fdr_model(const FleetSnapshot& snapshot, const demand::DemandForecast& forecast,
                         const geo::TravelTimeMatrix& t, const RepositionParams& params,
                         const FdrInputs& inputs) {
  const int n = t.size();
  if (static_cast<int>(forecast.values.size()) != n ||
      static_cast<int>(snapshot.touring.size()) != n ||
      static_cast<int>(snapshot.repositioning.size()) != n ||
      static_cast<int>(inputs.valid_target.size()) != n) {
    throw ConfigError("repositioning model: grid, forecast, snapshot and matrix sizes differ");
  }
  if (forecast.horizon_s != params.horizon_s) {
    throw ConfigError("repositioning model: forecast horizon differs from h");
  }
  for (const auto& v : snapshot.idle) {
    if (v.area < 0 || v.area >= n) throw ConfigError("repositioning model: idle vehicle area");
  }
  const auto idle = snapshot.idle_per_area();
  const auto& d = forecast.values;
  const double p = params.productivity;
  const double tc = params.coverage_s;

  // Areas with forecast demand reachable from each area.
  std::vector<std::vector<AreaId>> reach(n);
  for (int i = 0; i < n; ++i) {
    const double* row = t.row(i);
    for (int j = 0; j < n; ++j) {
      if (d[j] > 0.0 && row[j] <= tc) reach[i].push_back(j);
    }
  }

  FdrModel fm;
  auto& m = fm.model;
  std::vector<std::vector<mip::Term>> covered(n);   // Eq. 3 terms per demand area
  std::vector<std::vector<mip::Term>> capacity(n);  // Eq. 4 terms per area
  for (int i = 0; i < n; ++i) {
    for (const AreaId j : reach[i]) {
      const auto var = m.add_variable(0.0, d[j], params.w1 * d[j] -
                                                     params.coverage_time_weight * t.at(i, j),
                                      false);
      fm.coverage.push_back({i, j, var});
      covered[j].push_back({var, 1.0});
      capacity[i].push_back({var, 1.0});
    }
  }
  std::vector<std::vector<mip::Term>> outflow(n);
  for (int i = 0; i < n; ++i) {
    if (idle[i] == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i || !inputs.valid_target[j] || reach[j].empty()) continue;
      const auto var = m.add_variable(0.0, idle[i], -params.w2 - t.at(i, j), true);
      fm.moves.push_back({i, j, var});
      outflow[i].push_back({var, 1.0});
      capacity[i].push_back({var, p});
      capacity[j].push_back({var, -p});
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!outflow[i].empty()) m.add_constraint(std::move(outflow[i]), mip::Sense::less_equal, idle[i]);
  }
  for (int j = 0; j < n; ++j) {
    if (!covered[j].empty()) m.add_constraint(std::move(covered[j]), mip::Sense::less_equal, d[j]);
  }
  for (int i = 0; i < n; ++i) {
    // Without coverage terms the row only restates the idle-count bound.
    if (reach[i].empty()) continue;
    const double supply = idle[i] + snapshot.repositioning[i] +
                          params.touring_weight * snapshot.touring[i];
    m.add_constraint(std::move(capacity[i]), mip::Sense::less_equal, p * supply);
  }
  m.seal();
  return fm;
}

FdrSolution extract_solution(const FdrModel& model, const mip::Solution& sol) {
  FdrSolution out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.nodes = sol.nodes;
  if (!sol.has_values()) return out;
  for (const auto& a : model.moves) {
    const auto count = static_cast<int>(std::lround(sol.values[a.var]));
    if (count > 0) out.moves.push_back({a.from, a.to, count});
  }
  for (const auto& a : model.coverage) {
    const double v = sol.values[a.var];
    if (v > 1e-9) out.coverage.push_back({a.from, a.to, v});
  }
  return out;
}

}  // namespace rideshare::reposition
