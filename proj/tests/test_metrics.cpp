#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "portsim/metrics.hpp"

using namespace portsim;

namespace {

TripRecord trip(double arrival, double trip_s, RouteKind route = RouteKind::Manual) {
  TripRecord t;
  t.scheduled_arrival_s = arrival;
  t.exit_s = arrival + trip_s;
  t.route = route;
  return t;
}

RunSummary summary(std::uint64_t seed, double mean, std::string scenario = "s") {
  RunSummary s;
  s.scenario = std::move(scenario);
  s.seed = seed;
  s.mean_trip_s = mean;
  s.n_vehicles = 10;
  return s;
}

}  // namespace

TEST_CASE("bin means") {
  const std::vector<TripRecord> r{trip(10, 100), trip(390, 200), trip(410, 300)};
  const BinSeries b = bin_means(r, 400);
  REQUIRE(b.bins.size() == 2);
  CHECK(b.bins[0].bin_start_s == 0.0);
  CHECK(b.bins[0].count == 2);
  CHECK(b.bins[0].mean_trip_s == 150.0);
  CHECK(b.bins[1].bin_start_s == 400.0);
  CHECK(b.bins[1].count == 1);
  CHECK(b.bins[1].mean_trip_s == 300.0);

  CHECK(bin_means({}, 400).bins.empty());
  const std::vector<TripRecord> one{trip(1234, 55)};
  const BinSeries single = bin_means(one, 400);
  REQUIRE(single.bins.size() == 1);
  CHECK(single.bins[0].bin_start_s == 1200.0);

  // Keyed on exit, the 10+100 trip stays in bin 0 while 390+200 moves to 400.
  const BinSeries by_exit = bin_means(r, 400, BinKey::Exit);
  REQUIRE(by_exit.bins.size() == 2);
  CHECK(by_exit.bins[0].count == 1);
  CHECK(by_exit.bins[1].count == 2);

  CHECK_THROWS_AS(bin_means(r, 0), MetricsError);
}

TEST_CASE("bin algebra on random records") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> t(0, 5400), d(80, 4000);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<TripRecord> r(1 + gen() % 500);
    for (auto& x : r) x = trip(t(gen), d(gen));
    const BinSeries b = bin_means(r, 400);
    double weighted = 0;
    std::size_t n = 0;
    for (const BinRow& row : b.bins) {
      CHECK(std::fmod(row.bin_start_s, 400.0) == 0.0);
      weighted += row.mean_trip_s * static_cast<double>(row.count);
      n += row.count;
    }
    double pooled = 0;
    for (const auto& x : r) pooled += x.trip_time_s();
    CHECK(n == r.size());
    CHECK(weighted / n == doctest::Approx(pooled / r.size()).epsilon(1e-9));
    CHECK(std::is_sorted(b.bins.begin(), b.bins.end(),
                         [](const BinRow& a, const BinRow& c) { return a.bin_start_s < c.bin_start_s; }));
  }
}

TEST_CASE("nearest rank") {
  CHECK(nearest_rank({}, 95) == 0.0);
  CHECK(nearest_rank({42}, 95) == 42.0);
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::shuffle(v.begin(), v.end(), std::mt19937(3));
  CHECK(nearest_rank(v, 95) == 95.0);
  CHECK(nearest_rank(v, 100) == 100.0);
  CHECK(nearest_rank({1, 2, 3}, 50) == 2.0);
}

TEST_CASE("run summary") {
  RunResult r;
  r.scenario = "s";
  r.trips = {trip(0, 100), trip(5, 300, RouteKind::Automated)};
  r.arrivals = 2;
  const RunSummary s = summarize_run(r);
  CHECK(s.n_vehicles == 2);
  CHECK(s.mean_trip_s == 200.0);
  CHECK(s.p95_trip_s == 300.0);
  CHECK(s.manual.count == 1);
  CHECK(s.manual.mean_trip_s == 100.0);
  CHECK(s.automated.count == 1);
  CHECK(s.automated.mean_trip_s == 300.0);

  RunResult one;
  one.trips = {trip(0, 77)};
  CHECK(summarize_run(one).p95_trip_s == 77.0);

  // Pooled mean is the count-weighted mean of the route means.
  const RunSummary real = summarize_run(run(preset("opt1_p30"), 4));
  const double weighted = (real.manual.mean_trip_s * real.manual.count +
                           real.automated.mean_trip_s * real.automated.count) / real.n_vehicles;
  CHECK(real.mean_trip_s == doctest::Approx(weighted).epsilon(1e-12));
  CHECK(real.p95_trip_s >= real.mean_trip_s);
}

TEST_CASE("aggregate") {
  const std::vector<RunSummary> one{summary(1, 500)};
  const ReplicationStats a = aggregate(one);
  CHECK(a.n_runs == 1);
  CHECK(a.mean_of_means_s == 500.0);
  CHECK(a.sd_of_means_s == 0.0);

  const std::vector<RunSummary> two{summary(1, 500), summary(2, 520)};
  const ReplicationStats b = aggregate(two);
  CHECK(b.mean_of_means_s == 510.0);
  CHECK(b.sd_of_means_s == doctest::Approx(14.1421356).epsilon(1e-7));
  CHECK(b.min_mean_s == 500.0);
  CHECK(b.max_mean_s == 520.0);

  const std::vector<RunSummary> mixed{summary(1, 500, "a"), summary(2, 520, "b")};
  CHECK_THROWS_AS(aggregate(mixed), MetricsError);
  CHECK_THROWS_AS(aggregate(std::vector<RunSummary>{}), MetricsError);
}

TEST_CASE("aggregate is permutation invariant and bounded") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> m(100, 5000);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<RunSummary> s;
    for (std::uint64_t seed = 1; seed <= 1 + gen() % 30; ++seed) s.push_back(summary(seed, m(gen)));
    const ReplicationStats ref = aggregate(s);
    std::shuffle(s.begin(), s.end(), gen);
    const ReplicationStats perm = aggregate(s);
    CHECK(perm.mean_of_means_s == ref.mean_of_means_s);
    CHECK(perm.sd_of_means_s == ref.sd_of_means_s);
    CHECK(ref.min_mean_s <= ref.mean_of_means_s);
    CHECK(ref.mean_of_means_s <= ref.max_mean_s);
    CHECK(ref.sd_of_means_s >= 0.0);
  }
}

TEST_CASE("advantage") {
  ReplicationStats base, variant;
  base.mean_of_means_s = 590;
  variant.mean_of_means_s = 500;
  CHECK(advantage(base, variant) == 90.0);
  CHECK(advantage(base, base) == 0.0);
  CHECK(advantage(variant, base) == -90.0);
  variant.flow_fingerprint = base.flow_fingerprint + 1;
  CHECK_THROWS_AS(advantage(base, variant), MetricsError);
}

TEST_CASE("queue series") {
  ScenarioSpec s = preset("baseline");
  s.flow.rates_veh_per_min.assign(45, 0.0);
  const RunResult empty = run(s, 1);
  for (const char* e : {"filter", "manual_approach", "manual_plaza/0", "manual_plaza/4"}) {
    CAPTURE(e);
    const auto q = queue_series(empty, e);
    CHECK(std::all_of(q.begin(), q.end(), [](const QueueSample& x) { return x.occupancy_pce == 0.0; }));
  }
  CHECK_THROWS_AS(queue_series(empty, "nowhere"), MetricsError);

  const RunResult lone = run_with_arrivals(preset("baseline"), 3, {100.0});
  const auto f = queue_series(lone, "filter");
  REQUIRE(!f.empty());
  CHECK(std::any_of(f.begin(), f.end(), [](const QueueSample& x) { return x.occupancy_pce > 0.0; }));
  CHECK(f.back().occupancy_pce == 0.0);
  CHECK(std::is_sorted(f.begin(), f.end(), [](const QueueSample& a, const QueueSample& b) { return a.time_s < b.time_s; }));
}
