#include "portsim/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "portsim/metrics.hpp"

namespace portsim {

namespace {

constexpr double kEps = 1e-9;

std::string vehicle(const TripRecord& r) { return "vehicle " + std::to_string(r.vehicle_id); }

}  // namespace

std::vector<std::string> check_run_invariants(const ScenarioSpec& spec, const RunResult& result) {
  std::vector<std::string> out;

  if (result.trips.size() != result.arrivals)
    out.push_back("conservation: " + std::to_string(result.arrivals) + " arrivals but " +
                  std::to_string(result.trips.size()) + " trip records");

  for (const QueueSeries& q : result.queues)
    for (const QueueSample& s : q.samples)
      if (s.occupancy_pce > q.capacity_pce + kEps || s.occupancy_pce < -kEps) {
        out.push_back("capacity: " + q.element + " holds " + std::to_string(s.occupancy_pce) + " PCE at t=" +
                      std::to_string(s.time_s) + " (capacity " + std::to_string(q.capacity_pce) + ")");
        break;
      }

  std::map<std::pair<std::int32_t, std::int32_t>, std::vector<const TripRecord*>> queues;
  double min_service = kUnbounded;
  for (const ServiceStation& st : spec.network.stations) min_service = std::min(min_service, st.service.min_s);

  for (const TripRecord& r : result.trips) {
    if (!std::isfinite(r.exit_s)) {
      out.push_back("conservation: " + vehicle(r) + " never exited");
      continue;
    }
    const double trail[] = {r.scheduled_arrival_s, r.entered_network_s, r.reached_decision_s, r.admitted_station_s,
                            r.service_start_s,     r.service_end_s,     r.exit_s};
    for (std::size_t i = 1; i < std::size(trail); ++i)
      if (!(trail[i] >= trail[i - 1])) {
        out.push_back("timestamps: " + vehicle(r) + " out of causal order at step " + std::to_string(i));
        break;
      }

    const RouteSpec* route = spec.route(r.route);
    if (!route) {
      out.push_back("routing: " + vehicle(r) + " used a route the scenario does not have");
      continue;
    }
    const double floor_s = route_free_flow_s(spec, r.route) + route_station(spec, r.route).service.min_s;
    if (r.trip_time_s() < floor_s - kEps)
      out.push_back("causality: " + vehicle(r) + " trip " + std::to_string(r.trip_time_s()) +
                    " s is below the free-flow floor " + std::to_string(floor_s) + " s");

    if (r.route == RouteKind::Automated && r.kind == VehicleKind::Hgv &&
        spec.policy.eligibility == Eligibility::CarsOnly)
      out.push_back("eligibility: HGV " + vehicle(r) + " admitted to the automated station");

    queues[{r.station, r.lane}].push_back(&r);
  }

  for (auto& [key, members] : queues) {
    std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->admit_order < b->admit_order; });
    for (std::size_t i = 1; i < members.size(); ++i)
      if (members[i]->service_order < members[i - 1]->service_order) {
        out.push_back("fifo: " + vehicle(*members[i]) + " started service before " + vehicle(*members[i - 1]) +
                      " in the same queue");
        break;
      }
  }

  if (spec.policy.on_full == OnFull::Block)
    for (std::size_t i = 1; i < result.trips.size(); ++i)
      if (result.trips[i].decision_exit_order < result.trips[i - 1].decision_exit_order) {
        out.push_back("filter order: " + vehicle(result.trips[i]) + " passed the decision point ahead of " +
                      vehicle(result.trips[i - 1]));
        break;
      }

  if (!result.trips.empty()) {
    const RunSummary summary = summarize_run(result);
    const BinSeries bins = bin_means(result.trips, 400.0);
    double weighted = 0.0;
    std::size_t count = 0;
    for (const BinRow& b : bins.bins) {
      weighted += b.mean_trip_s * static_cast<double>(b.count);
      count += b.count;
    }
    weighted /= static_cast<double>(count);
    if (std::abs(weighted - summary.mean_trip_s) > 1e-9 * std::abs(summary.mean_trip_s))
      out.push_back("metrics: count-weighted bin mean " + std::to_string(weighted) + " differs from pooled mean " +
                    std::to_string(summary.mean_trip_s));
  }
  return out;
}

InvariantSuiteReport check_presets(std::span<const std::uint64_t> seeds) {
  const auto& names = preset_names();
  const std::size_t n = names.size() * seeds.size();
  std::vector<std::vector<std::string>> found(n);
  detail::for_each_index(n, Execution::Parallel, [&](std::size_t i) {
    const std::string& name = names[i / seeds.size()];
    const std::uint64_t seed = seeds[i % seeds.size()];
    const ScenarioSpec spec = preset(name);
    for (auto& v : check_run_invariants(spec, run(spec, seed)))
      found[i].push_back(name + " seed " + std::to_string(seed) + ": " + v);
  });

  InvariantSuiteReport report;
  report.runs = n;
  for (auto& f : found) report.violations.insert(report.violations.end(), f.begin(), f.end());
  return report;
}

}  // namespace portsim
