#include "rideshare/metrics/kpi.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include <json.hpp>

#include "rideshare/errors.h"

namespace rideshare::metrics {

namespace {

using Json = nlohmann::ordered_json;

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

std::string optional_number(const std::optional<double>& v) {
  return v ? number(*v) : std::string();
}

}  // namespace

KpiAccumulator::KpiAccumulator(double warmup_end, double series_end, int fleet_size)
    : warmup_end_(warmup_end), fleet_size_(fleet_size) {
  const double span = series_end - warmup_end;
  const auto minutes = span > 0.0 ? static_cast<std::int64_t>(std::ceil(span / 60.0)) : 0;
  series_.resize(minutes);
  for (std::int64_t k = 0; k < minutes; ++k) series_[k].minute = k;
}

void KpiAccumulator::record_outcome(std::int64_t request_id, double request_time,
                                    bool accepted) {
  if (!counts(request_time)) return;
  index_[request_id] = ledger_.size();
  ledger_.push_back({request_id, request_time, accepted, std::nullopt});
  const auto minute = static_cast<std::int64_t>(std::floor((request_time - warmup_end_) / 60.0));
  if (minute < num_minutes()) {
    ++series_[minute].requests;
    if (!accepted) ++series_[minute].rejections;
  }
}

void KpiAccumulator::record_pickup(std::int64_t request_id, double pickup_time) {
  const auto it = index_.find(request_id);
  if (it == index_.end()) return;
  auto& e = ledger_[it->second];
  e.waiting_s = pickup_time - e.request_time;
}

void KpiAccumulator::record_travel(double start, double end, bool repositioning) {
  const double counted = end - std::max(start, warmup_end_);
  if (counted <= 0.0) return;
  travel_s_ += counted;
  if (repositioning) repositioning_s_ += counted;
}

void KpiAccumulator::record_sample(std::int64_t minute, int idle, int touring,
                                   int repositioning) {
  if (minute < 0 || minute >= num_minutes()) return;
  auto& s = series_[minute];
  s.idle = idle;
  s.touring = touring;
  s.repositioning = repositioning;
}

KpiReport summarize(const std::vector<LedgerEntry>& ledger, int fleet_size) {
  KpiReport r;
  r.fleet_size = fleet_size;
  std::vector<double> waits;
  for (const auto& e : ledger) {
    ++r.total_requests;
    if (e.accepted) {
      ++r.accepted;
      if (e.waiting_s) waits.push_back(*e.waiting_s);
    } else {
      ++r.rejected;
    }
  }
  if (r.total_requests > 0) {
    r.rejection_rate = static_cast<double>(r.rejected) / static_cast<double>(r.total_requests);
  }
  if (!waits.empty()) {
    double sum = 0.0;
    for (const double w : waits) sum += w;
    r.mean_waiting_s = sum / static_cast<double>(waits.size());
    std::sort(waits.begin(), waits.end());
    const auto mid = waits.size() / 2;
    r.median_waiting_s = waits.size() % 2 == 1 ? waits[mid] : (waits[mid - 1] + waits[mid]) / 2.0;
  }
  return r;
}

KpiReport KpiAccumulator::finalize() const {
  KpiReport r = summarize(ledger_, fleet_size_);
  r.total_vehicle_travel_s = travel_s_;
  r.mean_vehicle_travel_s = fleet_size_ > 0 ? travel_s_ / fleet_size_ : 0.0;
  r.repositioning_travel_s = repositioning_s_;
  r.series = series_;
  return r;
}

void write_json(const KpiReport& r, std::ostream& out) {
  Json j;
  j["total_requests"] = r.total_requests;
  j["accepted"] = r.accepted;
  j["rejected"] = r.rejected;
  j["rejection_rate"] = r.rejection_rate;
  j["mean_waiting_s"] = r.mean_waiting_s ? Json(*r.mean_waiting_s) : Json(nullptr);
  j["median_waiting_s"] = r.median_waiting_s ? Json(*r.median_waiting_s) : Json(nullptr);
  j["total_vehicle_travel_s"] = r.total_vehicle_travel_s;
  j["mean_vehicle_travel_s"] = r.mean_vehicle_travel_s;
  j["repositioning_travel_s"] = r.repositioning_travel_s;
  j["fleet_size"] = r.fleet_size;
  Json series = Json::array();
  for (const auto& s : r.series) {
    series.push_back({{"minute", s.minute},
                      {"idle", s.idle},
                      {"touring", s.touring},
                      {"repositioning", s.repositioning},
                      {"requests", s.requests},
                      {"rejections", s.rejections}});
  }
  j["series"] = std::move(series);
  out << j.dump(2) << '\n';
}

KpiReport read_json(std::istream& in) {
  try {
    const Json j = Json::parse(in);
    KpiReport r;
    r.total_requests = j.at("total_requests").get<std::int64_t>();
    r.accepted = j.at("accepted").get<std::int64_t>();
    r.rejected = j.at("rejected").get<std::int64_t>();
    r.rejection_rate = j.at("rejection_rate").get<double>();
    if (!j.at("mean_waiting_s").is_null()) r.mean_waiting_s = j["mean_waiting_s"].get<double>();
    if (!j.at("median_waiting_s").is_null()) r.median_waiting_s = j["median_waiting_s"].get<double>();
    r.total_vehicle_travel_s = j.at("total_vehicle_travel_s").get<double>();
    r.mean_vehicle_travel_s = j.at("mean_vehicle_travel_s").get<double>();
    r.repositioning_travel_s = j.at("repositioning_travel_s").get<double>();
    r.fleet_size = j.at("fleet_size").get<int>();
    for (const auto& s : j.at("series")) {
      r.series.push_back({s.at("minute").get<std::int64_t>(), s.at("idle").get<int>(),
                          s.at("touring").get<int>(), s.at("repositioning").get<int>(),
                          s.at("requests").get<int>(), s.at("rejections").get<int>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("kpi json: ") + e.what());
  }
}

void write_kpi_csv(const KpiReport& r, std::ostream& out) {
  out << "total_requests,accepted,rejected,rejection_rate,mean_waiting_s,median_waiting_s,"
         "total_vehicle_travel_s,mean_vehicle_travel_s,repositioning_travel_s,fleet_size\n";
  out << r.total_requests << ',' << r.accepted << ',' << r.rejected << ','
      << number(r.rejection_rate) << ',' << optional_number(r.mean_waiting_s) << ','
      << optional_number(r.median_waiting_s) << ',' << number(r.total_vehicle_travel_s) << ','
      << number(r.mean_vehicle_travel_s) << ',' << number(r.repositioning_travel_s) << ','
      << r.fleet_size << '\n';
}

void write_timeseries_csv(const KpiReport& r, std::ostream& out) {
  out << kTimeseriesHeader << '\n';
  for (const auto& s : r.series) {
    out << s.minute << ',' << s.idle << ',' << s.touring << ',' << s.repositioning << ','
        << s.requests << ',' << s.rejections << '\n';
  }
}

}  // namespace rideshare::metrics
