#include "portsim/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "parallel.hpp"
#include "portsim/engine.hpp"
#include "portsim/stochastic.hpp"

namespace portsim {

namespace {

void require_valid(const ScenarioSpec& spec) {
  const auto violations = validate(spec);
  if (violations.empty()) return;
  std::string msg = "invalid scenario '" + spec.label + "':";
  for (const auto& v : violations) msg += "\n  " + v;
  throw ExperimentError(msg);
}

void require_distinct(std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ExperimentError("at least one seed is required");
  std::set<std::uint64_t> seen;
  for (std::uint64_t s : seeds)
    if (!seen.insert(s).second) throw ExperimentError("duplicate seed " + std::to_string(s));
}

std::string fraction_label(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", f);
  return buf;
}

std::uint64_t parse_u64(std::string_view s, std::string_view whole) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ExperimentError("bad seed list '" + std::string(whole) + "'");
  return v;
}

}  // namespace

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  return seeds;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view item = text.substr(pos, comma - pos);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const std::uint64_t lo = parse_u64(item.substr(0, dots), text);
      const std::uint64_t hi = parse_u64(item.substr(dots + 2), text);
      if (hi < lo) throw ExperimentError("empty seed range '" + std::string(item) + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_u64(item, text));
    }
    pos = comma + 1;
  }
  return seeds;
}

ReplicationSet replicate(const ScenarioSpec& spec, std::span<const std::uint64_t> seeds, Execution execution,
                         double bin_width_s) {
  require_valid(spec);
  require_distinct(seeds);

  ReplicationSet out;
  out.summaries.resize(seeds.size());
  std::vector<std::vector<TripRecord>> trips(seeds.size());
  detail::for_each_index(seeds.size(), execution, [&](std::size_t i) {
    RunResult r = run(spec, seeds[i]);
    out.summaries[i] = summarize_run(r);
    trips[i] = std::move(r.trips);
  });

  std::vector<TripRecord> pooled;
  for (auto& t : trips) pooled.insert(pooled.end(), t.begin(), t.end());
  out.bins = bin_means(pooled, bin_width_s);
  out.stats = aggregate(out.summaries);
  return out;
}

std::vector<RunSummary> run_replications(const ScenarioSpec& spec, std::span<const std::uint64_t> seeds,
                                         Execution execution) {
  require_valid(spec);
  require_distinct(seeds);
  std::vector<RunSummary> out(seeds.size());
  detail::for_each_index(seeds.size(), execution,
                         [&](std::size_t i) { out[i] = summarize_run(run(spec, seeds[i])); });
  return out;
}

SweepResult sweep_adoption(const ScenarioSpec& base, std::span<const double> fractions,
                           std::span<const std::uint64_t> seeds, Execution execution) {
  std::vector<double> sorted(fractions.begin(), fractions.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty() || sorted.front() != 0.0)
    throw ExperimentError("adoption sweep needs the 0 baseline fraction");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ExperimentError("adoption fractions must be distinct");
  if (sorted.back() > 1.0) throw ExperimentError("adoption fractions must lie in [0,1]");

  SweepResult out;
  for (double f : sorted) {
    ScenarioSpec spec = with_adoption(base, f);
    spec.label = base.label + "@" + fraction_label(f);
    SweepRow row;
    row.scenario = spec.label;
    row.fraction = f;
    row.runs = replicate(spec, seeds, execution);
    out.rows.push_back(std::move(row));
  }
  for (SweepRow& row : out.rows) row.advantage_s = advantage(out.rows.front().runs.stats, row.runs.stats);
  return out;
}

double pollaczek_khinchine_wq(double arrival_rate, const ServiceTimeSpec& service) {
  const double rho = arrival_rate * truncated_normal_mean(service);
  if (rho >= 1.0) throw ExperimentError("utilization must be below 1");
  return arrival_rate * truncated_normal_second_moment(service) / (2.0 * (1.0 - rho));
}

Mg1Report validate_mg1(double arrival_rate, const ServiceTimeSpec& service, std::size_t n_vehicles,
                       std::span<const std::uint64_t> seeds, Execution execution) {
  Mg1Report rep;
  rep.arrival_rate = arrival_rate;
  rep.mean_service_s = truncated_normal_mean(service);
  rep.second_moment_s2 = truncated_normal_second_moment(service);
  rep.rho = arrival_rate * rep.mean_service_s;
  if (!(arrival_rate > 0)) throw ExperimentError("arrival rate must be positive");
  if (rep.rho >= 1.0) throw ExperimentError("utilization rho = " + std::to_string(rep.rho) + " must be below 1");
  if (n_vehicles == 0) throw ExperimentError("n_vehicles must be positive");
  require_distinct(seeds);
  rep.analytic_wq_s = pollaczek_khinchine_wq(arrival_rate, service);

  ScenarioSpec spec = preset("mg1_calibration");
  spec.network.stations.front().service = service;
  spec.flow.segment_s = static_cast<double>(n_vehicles) / arrival_rate;
  spec.flow.rates_veh_per_min = {arrival_rate * 60.0};
  require_valid(spec);

  RunOptions options;
  options.record_queues = false;
  std::vector<double> sums(seeds.size(), 0.0);
  std::vector<std::size_t> counts(seeds.size(), 0);
  detail::for_each_index(seeds.size(), execution, [&](std::size_t i) {
    const RunResult r = run(spec, seeds[i], options);
    const std::size_t warmup = r.trips.size() / 5;
    for (std::size_t k = warmup; k < r.trips.size(); ++k) {
      sums[i] += r.trips[k].service_start_s - r.trips[k].admitted_station_s;
      ++counts[i];
    }
  });

  double sum = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    sum += sums[i];
    rep.measured_vehicles += counts[i];
  }
  if (rep.measured_vehicles > 0) rep.simulated_wq_s = sum / static_cast<double>(rep.measured_vehicles);
  rep.relative_error = rep.analytic_wq_s > 0 ? std::abs(rep.simulated_wq_s - rep.analytic_wq_s) / rep.analytic_wq_s
                                             : std::abs(rep.simulated_wq_s);
  return rep;
}

Figures reproduce_figures(std::span<const std::uint64_t> seeds, Execution execution) {
  Figures fig;

  const std::pair<const char*, double> adoption[] = {
      {"baseline", 0.0}, {"opt1_p10", 0.1}, {"opt1_p20", 0.2}, {"opt1_p30", 0.3}};
  ReplicationStats baseline;
  for (const auto& [name, fraction] : adoption) {
    const ReplicationSet set = replicate(preset(name), seeds, execution);
    if (fraction == 0.0) baseline = set.stats;
    for (const BinRow& b : set.bins.bins) fig.fig2.push_back({fraction, b.bin_start_s, b.count, b.mean_trip_s});
    for (const RunSummary& s : set.summaries) fig.fig3.push_back({fraction, s.seed, s.mean_trip_s});
  }

  fig.fig4.push_back({"baseline", baseline, 0.0});
  for (const char* name : {"opt1_cars100", "opt2_cars100_k5", "opt2_cars100_k3", "opt2_cars100_k2"}) {
    const ReplicationStats stats = replicate(preset(name), seeds, execution).stats;
    fig.fig4.push_back({name, stats, advantage(baseline, stats)});
  }
  return fig;
}

}  // namespace portsim
