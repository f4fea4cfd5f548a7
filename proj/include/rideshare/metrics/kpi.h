#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

namespace rideshare::metrics {

inline constexpr const char* kTimeseriesHeader =
    "minute,idle,touring,repositioning,requests,rejections";

// Fleet state at the start of a post-warm-up minute, and the requests and
// rejections whose request_time falls inside that minute.
struct UtilizationSample {
  std::int64_t minute = 0;
  int idle = 0;
  int touring = 0;
  int repositioning = 0;
  int requests = 0;
  int rejections = 0;

  bool operator==(const UtilizationSample&) const = default;
};

struct KpiReport {
  std::int64_t total_requests = 0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  double rejection_rate = 0.0;
  // Absent when no counted request was picked up.
  std::optional<double> mean_waiting_s;
  std::optional<double> median_waiting_s;
  double total_vehicle_travel_s = 0.0;
  double mean_vehicle_travel_s = 0.0;
  double repositioning_travel_s = 0.0;
  int fleet_size = 0;
  std::vector<UtilizationSample> series;

  bool operator==(const KpiReport&) const = default;
};

// One replayed request that counts toward the report.
struct LedgerEntry {
  std::int64_t request_id = 0;
  double request_time = 0.0;
  bool accepted = false;
  std::optional<double> waiting_s;
};

// Collects outcomes during a run. Requests count when their request_time is
// at or after the warm-up end; travel counts for the part driven after it.
class KpiAccumulator {
 public:
  // The series covers the whole minutes starting in [warmup_end, series_end).
  KpiAccumulator(double warmup_end, double series_end, int fleet_size);

  [[nodiscard]] bool counts(double clock) const { return clock >= warmup_end_; }
  [[nodiscard]] double warmup_end() const { return warmup_end_; }
  [[nodiscard]] std::int64_t num_minutes() const { return static_cast<std::int64_t>(series_.size()); }
  // Start of minute k of the series.
  [[nodiscard]] double minute_start(std::int64_t k) const { return warmup_end_ + 60.0 * k; }

  void record_outcome(std::int64_t request_id, double request_time, bool accepted);
  void record_pickup(std::int64_t request_id, double pickup_time);
  void record_travel(double start, double end, bool repositioning);
  void record_sample(std::int64_t minute, int idle, int touring, int repositioning);

  [[nodiscard]] const std::vector<LedgerEntry>& ledger() const { return ledger_; }
  [[nodiscard]] KpiReport finalize() const;

 private:
  double warmup_end_;
  int fleet_size_;
  std::vector<LedgerEntry> ledger_;
  std::unordered_map<std::int64_t, std::size_t> index_;
  std::vector<UtilizationSample> series_;
  double travel_s_ = 0.0;
  double repositioning_s_ = 0.0;
};

// Scalar statistics recomputed from the ledger alone.
KpiReport summarize(const std::vector<LedgerEntry>& ledger, int fleet_size);

void write_json(const KpiReport& report, std::ostream& out);
// Throws LoadError on malformed input.
KpiReport read_json(std::istream& in);
void write_kpi_csv(const KpiReport& report, std::ostream& out);
void write_timeseries_csv(const KpiReport& report, std::ostream& out);

}  // namespace rideshare::metrics
