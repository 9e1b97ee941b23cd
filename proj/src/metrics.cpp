#include "portsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace portsim {

BinSeries bin_means(std::span<const TripRecord> records, double bin_width_s, BinKey key) {
  if (!(bin_width_s > 0)) throw MetricsError("bin width must be positive");
  struct Acc {
    std::size_t count = 0;
    double sum = 0.0;
  };
  std::map<long long, Acc> bins;
  for (const TripRecord& r : records) {
    const double t = key == BinKey::ScheduledArrival ? r.scheduled_arrival_s : r.exit_s;
    Acc& a = bins[static_cast<long long>(std::floor(t / bin_width_s))];
    ++a.count;
    a.sum += r.trip_time_s();
  }
  BinSeries out;
  out.bin_width_s = bin_width_s;
  for (const auto& [index, acc] : bins)
    out.bins.push_back({static_cast<double>(index) * bin_width_s, acc.count, acc.sum / static_cast<double>(acc.count)});
  return out;
}

double nearest_rank(std::vector<double> values, double percentile) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

RunSummary summarize_run(const RunResult& result) {
  RunSummary s;
  s.scenario = result.scenario;
  s.seed = result.seed;
  s.flow_fingerprint = result.flow_fingerprint;
  s.n_vehicles = result.trips.size();

  double total = 0.0;
  double route_sum[2] = {0.0, 0.0};
  std::vector<double> trips;
  trips.reserve(result.trips.size());
  for (const TripRecord& r : result.trips) {
    const double t = r.trip_time_s();
    trips.push_back(t);
    total += t;
    const int k = r.route == RouteKind::Manual ? 0 : 1;
    route_sum[k] += t;
    ++(k == 0 ? s.manual.count : s.automated.count);
  }
  if (s.n_vehicles > 0) s.mean_trip_s = total / static_cast<double>(s.n_vehicles);
  if (s.manual.count > 0) s.manual.mean_trip_s = route_sum[0] / static_cast<double>(s.manual.count);
  if (s.automated.count > 0) s.automated.mean_trip_s = route_sum[1] / static_cast<double>(s.automated.count);
  s.p95_trip_s = nearest_rank(std::move(trips), 95.0);

  for (const QueueSeries& q : result.queues)
    for (const QueueSample& sample : q.samples) s.max_queue_pce = std::max(s.max_queue_pce, sample.occupancy_pce);
  return s;
}

ReplicationStats aggregate(std::span<const RunSummary> summaries) {
  if (summaries.empty()) throw MetricsError("aggregate needs at least one run");
  std::vector<const RunSummary*> ordered;
  for (const RunSummary& s : summaries) {
    if (s.scenario != summaries.front().scenario)
      throw MetricsError("cannot aggregate runs of different scenarios ('" + summaries.front().scenario + "' and '" +
                         s.scenario + "')");
    ordered.push_back(&s);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->seed < b->seed; });

  ReplicationStats st;
  st.scenario = summaries.front().scenario;
  st.flow_fingerprint = summaries.front().flow_fingerprint;
  st.n_runs = ordered.size();
  st.min_mean_s = ordered.front()->mean_trip_s;
  st.max_mean_s = ordered.front()->mean_trip_s;
  double sum = 0.0;
  for (const RunSummary* s : ordered) {
    sum += s->mean_trip_s;
    st.min_mean_s = std::min(st.min_mean_s, s->mean_trip_s);
    st.max_mean_s = std::max(st.max_mean_s, s->mean_trip_s);
  }
  st.mean_of_means_s = sum / static_cast<double>(st.n_runs);
  if (st.n_runs > 1) {
    double ss = 0.0;
    for (const RunSummary* s : ordered) ss += (s->mean_trip_s - st.mean_of_means_s) * (s->mean_trip_s - st.mean_of_means_s);
    st.sd_of_means_s = std::sqrt(ss / static_cast<double>(st.n_runs - 1));
  }
  // Rounding can put the mean a hair outside [min, max] when all runs agree.
  st.mean_of_means_s = std::clamp(st.mean_of_means_s, st.min_mean_s, st.max_mean_s);
  return st;
}

double advantage(const ReplicationStats& base, const ReplicationStats& variant) {
  if (base.flow_fingerprint != variant.flow_fingerprint)
    throw MetricsError("scenarios '" + base.scenario + "' and '" + variant.scenario +
                       "' use different flow profiles and cannot be compared");
  return base.mean_of_means_s - variant.mean_of_means_s;
}

std::vector<QueueSample> queue_series(const RunResult& result, std::string_view element) {
  for (const QueueSeries& q : result.queues)
    if (q.element == element) return q.samples;
  throw MetricsError("no queue series for element '" + std::string(element) + "'");
}

}  // namespace portsim
