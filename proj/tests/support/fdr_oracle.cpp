#include "support/fdr_oracle.h"

namespace rideshare::testing {

FullFdrModel full_fdr_model(const reposition::FleetSnapshot& snap,
                            const demand::DemandForecast& f, const geo::TravelTimeMatrix& t,
                            const reposition::RepositionParams& prm,
                            const reposition::FdrInputs& in) {
  const int n = t.size();
  FullFdrModel fm;
  auto& m = fm.model;
  std::vector<int> idle(n, 0);
  for (const auto& v : snap.idle) ++idle[v.area];
  std::vector<std::vector<mip::Term>> out(n), cover(n), cap(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (t.at(i, j) > prm.coverage_s) continue;
      const auto v = m.add_variable(
          0.0, mip::kInfinity, prm.w1 * f.values[j] - prm.coverage_time_weight * t.at(i, j), false);
      fm.moves.push_back({-1, -1});
      fm.primary.push_back(prm.w1 * f.values[j]);
      cover[j].push_back({v, 1.0});
      cap[i].push_back({v, 1.0});
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !in.valid_target[j]) continue;
      const auto v = m.add_variable(0.0, idle[i], -prm.w2 - t.at(i, j), true);
      fm.moves.push_back({i, j});
      fm.primary.push_back(0.0);
      out[i].push_back({v, 1.0});
      cap[i].push_back({v, prm.productivity});
      cap[j].push_back({v, -prm.productivity});
    }
  }
  for (int i = 0; i < n; ++i) {
    m.add_constraint(out[i], mip::Sense::less_equal, idle[i]);
    m.add_constraint(cover[i], mip::Sense::less_equal, f.values[i]);
    const double supply =
        idle[i] + snap.repositioning[i] + prm.touring_weight * snap.touring[i];
    m.add_constraint(cap[i], mip::Sense::less_equal, prm.productivity * supply);
  }
  m.seal();
  return fm;
}

double primary_term(const FullFdrModel& fm, const std::vector<double>& values) {
  double sum = 0.0;
  for (std::size_t k = 0; k < fm.primary.size(); ++k) sum += fm.primary[k] * values[k];
  return sum;
}

}  // namespace rideshare::testing
