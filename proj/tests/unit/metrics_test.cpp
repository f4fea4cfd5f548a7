#include <doctest.h>

#include <random>
#include <sstream>

#include "rideshare/metrics/kpi.h"
#include "rideshare/sim/simulator.h"
#include "support/synthetic.h"

using namespace rideshare;
using namespace rideshare::metrics;

TEST_CASE("rejection rate counts rejected over all counted requests") {
  KpiAccumulator acc(0.0, 3600.0, 3);
  for (int k = 0; k < 12; ++k) acc.record_outcome(k, 10.0 * k, k < 10);
  const auto r = acc.finalize();
  CHECK(r.total_requests == 12);
  CHECK(r.accepted == 10);
  CHECK(r.rejected == 2);
  CHECK(r.rejection_rate == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("waiting time statistics") {
  KpiAccumulator acc(0.0, 3600.0, 1);
  const double waits[] = {180.0, 60.0, 120.0};
  for (int k = 0; k < 3; ++k) {
    acc.record_outcome(k, 100.0 * k, true);
    acc.record_pickup(k, 100.0 * k + waits[k]);
  }
  auto r = acc.finalize();
  CHECK(*r.mean_waiting_s == 120.0);
  CHECK(*r.median_waiting_s == 120.0);

  acc.record_outcome(3, 400.0, true);
  acc.record_pickup(3, 400.0 + 100.0);
  r = acc.finalize();
  CHECK(*r.median_waiting_s == 110.0);
  CHECK(*r.mean_waiting_s == 115.0);
}

TEST_CASE("an empty report has no waiting statistics") {
  KpiAccumulator acc(0.0, 600.0, 4);
  const auto r = acc.finalize();
  CHECK(r.total_requests == 0);
  CHECK(r.rejection_rate == 0.0);
  CHECK_FALSE(r.mean_waiting_s.has_value());
  CHECK_FALSE(r.median_waiting_s.has_value());
  std::ostringstream out;
  write_json(r, out);
  CHECK(out.str().find("\"mean_waiting_s\": null") != std::string::npos);
  std::istringstream in(out.str());
  CHECK(read_json(in) == r);
}

TEST_CASE("warm-up boundary is closed") {
  const double start = 1'700'000'000.0;
  const double warm = start + 6 * 3600.0;
  KpiAccumulator acc(warm, start + 24 * 3600.0, 2);
  acc.record_outcome(1, start + 3 * 3600.0, true);
  acc.record_outcome(2, start + 7 * 3600.0, false);
  acc.record_outcome(3, warm, true);
  acc.record_outcome(4, std::nextafter(warm, 0.0), true);
  acc.record_pickup(1, start + 3 * 3600.0 + 50.0);
  acc.record_pickup(3, warm + 30.0);
  const auto& ledger = acc.ledger();
  REQUIRE(ledger.size() == 2);
  CHECK(ledger[0].request_id == 2);
  CHECK(ledger[1].request_id == 3);
  const auto r = acc.finalize();
  CHECK(r.total_requests == 2);
  CHECK(*r.mean_waiting_s == 30.0);
  REQUIRE(r.series.size() == 18 * 60);
  CHECK(r.series[0].requests == 1);
  CHECK(r.series[60].requests == 1);
  CHECK(r.series[60].rejections == 1);
}

TEST_CASE("travel counts only after warm-up") {
  KpiAccumulator acc(1000.0, 5000.0, 2);
  acc.record_travel(500.0, 900.0, false);
  acc.record_travel(900.0, 1100.0, true);
  acc.record_travel(2000.0, 2300.0, false);
  const auto r = acc.finalize();
  CHECK(r.total_vehicle_travel_s == 400.0);
  CHECK(r.repositioning_travel_s == 100.0);
  CHECK(r.mean_vehicle_travel_s == 200.0);
}

TEST_CASE("series rows and CSV output") {
  KpiAccumulator acc(0.0, 150.0, 3);
  REQUIRE(acc.num_minutes() == 3);
  acc.record_sample(0, 3, 0, 0);
  acc.record_sample(1, 1, 1, 1);
  acc.record_sample(2, 0, 2, 1);
  acc.record_sample(3, 9, 9, 9);
  acc.record_outcome(10, 65.0, false);
  acc.record_outcome(11, 149.0, true);
  const auto r = acc.finalize();
  std::ostringstream csv;
  write_timeseries_csv(r, csv);
  CHECK(csv.str() ==
        "minute,idle,touring,repositioning,requests,rejections\n"
        "0,3,0,0,0,0\n"
        "1,1,1,1,1,1\n"
        "2,0,2,1,1,0\n");
  std::ostringstream kpi;
  write_kpi_csv(r, kpi);
  CHECK(kpi.str().rfind("total_requests,accepted,rejected,rejection_rate,", 0) == 0);
  CHECK(kpi.str().find("\n2,1,1,0.5,,,0,0,0,3\n") != std::string::npos);
}

TEST_CASE("JSON round trip and malformed input") {
  KpiReport r;
  r.total_requests = 7;
  r.accepted = 5;
  r.rejected = 2;
  r.rejection_rate = 2.0 / 7.0;
  r.mean_waiting_s = 101.25;
  r.median_waiting_s = 0.1 + 0.2;
  r.total_vehicle_travel_s = 12345.678;
  r.mean_vehicle_travel_s = 12345.678 / 3.0;
  r.repositioning_travel_s = 17.0;
  r.fleet_size = 3;
  r.series = {{0, 1, 1, 1, 2, 1}, {1, 3, 0, 0, 0, 0}};
  std::ostringstream out;
  write_json(r, out);
  std::istringstream in(out.str());
  CHECK(read_json(in) == r);

  std::istringstream broken("{\"total_requests\": 1");
  CHECK_THROWS_AS(read_json(broken), LoadError);
  std::istringstream missing("{\"total_requests\": 1}");
  CHECK_THROWS_AS(read_json(missing), LoadError);
}

TEST_CASE("summarize recomputes the scalar statistics from the ledger") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  KpiAccumulator acc(0.0, 7200.0, 10);
  for (int k = 0; k < 501; ++k) {
    const bool ok = u(rng) < 0.8;
    acc.record_outcome(k, 10.0 * k, ok);
    if (ok) acc.record_pickup(k, 10.0 * k + 240.0 * u(rng));
  }
  const auto full = acc.finalize();
  const auto again = summarize(acc.ledger(), 10);
  CHECK(again.total_requests == full.total_requests);
  CHECK(again.accepted == full.accepted);
  CHECK(again.rejected == full.rejected);
  CHECK(again.rejection_rate == full.rejection_rate);
  CHECK(again.mean_waiting_s == full.mean_waiting_s);
  CHECK(again.median_waiting_s == full.median_waiting_s);
}

TEST_CASE("a simulated report survives JSON and matches its ledger") {
  testing::SyntheticSpec spec;
  spec.duration_s = 3 * 3600.0;
  const auto reqs = testing::synthetic_requests(spec);
  sim::SimConfig cfg;
  cfg.mode = sim::Mode::react;
  cfg.fleet_size = 25;
  cfg.start = spec.start;
  cfg.end = spec.start + spec.duration_s;
  cfg.warmup_s = 3600.0;
  sim::Simulator s(cfg, reqs, geo::build_grid(testing::synthetic_bbox(spec), 1000.0),
                   geo::TravelTimeProvider::constant_speed());
  const auto r = s.run();
  std::ostringstream out;
  write_json(r, out);
  std::istringstream in(out.str());
  CHECK(read_json(in) == r);
  const auto again = summarize(s.accumulator().ledger(), 25);
  CHECK(again.rejection_rate == r.rejection_rate);
  CHECK(again.mean_waiting_s == r.mean_waiting_s);
}
