#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "oracles.hpp"
#include "portsim/experiments.hpp"
#include "portsim/stochastic.hpp"

using namespace portsim;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("seed lists") {
  CHECK(default_seeds().size() == 20);
  CHECK(default_seeds().front() == 1);
  CHECK(default_seeds().back() == 20);
  CHECK(parse_seed_list("1..4,10") == std::vector<std::uint64_t>{1, 2, 3, 4, 10});
  CHECK(parse_seed_list("7") == std::vector<std::uint64_t>{7});
  CHECK_THROWS_AS(parse_seed_list(""), ExperimentError);
  CHECK_THROWS_AS(parse_seed_list("5..2"), ExperimentError);
  CHECK_THROWS_AS(parse_seed_list("a"), ExperimentError);
}

TEST_CASE("replications") {
  const ScenarioSpec spec = preset("opt1_p10");
  const auto seeds = default_seeds();
  const auto a = run_replications(spec, seeds);
  const auto b = run_replications(spec, seeds);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seed == seeds[i]);
    CHECK(same_bits(a[i].mean_trip_s, b[i].mean_trip_s));
  }

  const auto other = run_replications(spec, parse_seed_list("21..40"));
  CHECK(aggregate(a).mean_of_means_s != aggregate(other).mean_of_means_s);

  const std::vector<std::uint64_t> dup{1, 2, 1};
  CHECK_THROWS_AS(run_replications(spec, dup), ExperimentError);

  ScenarioSpec bad = spec;
  bad.policy.adoption_fraction = 2.0;
  CHECK_THROWS_AS(run_replications(bad, seeds), ExperimentError);
}

TEST_CASE("parallel replications match the serial reference bit for bit") {
  for (const char* name : {"baseline", "opt1_p30", "opt2_cars100_k3"}) {
    CAPTURE(name);
    const ScenarioSpec spec = preset(name);
    const ReplicationSet s = replicate(spec, default_seeds(), Execution::Serial);
    const ReplicationSet p = replicate(spec, default_seeds(), Execution::Parallel);
    REQUIRE(s.summaries.size() == p.summaries.size());
    for (std::size_t i = 0; i < s.summaries.size(); ++i) {
      CHECK(s.summaries[i].seed == p.summaries[i].seed);
      CHECK(same_bits(s.summaries[i].mean_trip_s, p.summaries[i].mean_trip_s));
      CHECK(same_bits(s.summaries[i].p95_trip_s, p.summaries[i].p95_trip_s));
      CHECK(same_bits(s.summaries[i].max_queue_pce, p.summaries[i].max_queue_pce));
    }
    CHECK(same_bits(s.stats.mean_of_means_s, p.stats.mean_of_means_s));
    CHECK(same_bits(s.stats.sd_of_means_s, p.stats.sd_of_means_s));
    REQUIRE(s.bins.bins.size() == p.bins.bins.size());
    for (std::size_t i = 0; i < s.bins.bins.size(); ++i) CHECK(same_bits(s.bins.bins[i].mean_trip_s, p.bins.bins[i].mean_trip_s));
  }
}

TEST_CASE("adoption sweep") {
  const auto seeds = parse_seed_list("1..4");
  const std::vector<double> fractions{0.3, 0.0, 0.1};
  const SweepResult r = sweep_adoption(preset("opt1_p10"), fractions, seeds);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].fraction == 0.0);
  CHECK(r.rows[1].fraction == 0.1);
  CHECK(r.rows[2].fraction == 0.3);
  CHECK(r.rows[0].advantage_s == 0.0);
  for (const SweepRow& row : r.rows) {
    CHECK(row.runs.summaries.size() == seeds.size());
    CHECK(row.advantage_s == doctest::Approx(r.rows[0].runs.stats.mean_of_means_s - row.runs.stats.mean_of_means_s));
  }
  CHECK(r.rows[0].scenario == "opt1_p10@0");
  CHECK(r.rows[2].scenario == "opt1_p10@0.3");

  // The zero row is the same system as the baseline preset.
  CHECK(same_bits(r.rows[0].runs.stats.mean_of_means_s,
                  replicate(preset("baseline"), seeds).stats.mean_of_means_s));

  const std::vector<double> no_zero{0.1, 0.2};
  CHECK_THROWS_AS(sweep_adoption(preset("opt1_p10"), no_zero, seeds), ExperimentError);
  const std::vector<double> dup{0.0, 0.1, 0.1};
  CHECK_THROWS_AS(sweep_adoption(preset("opt1_p10"), dup, seeds), ExperimentError);
  const std::vector<double> big{0.0, 1.5};
  CHECK_THROWS_AS(sweep_adoption(preset("opt1_p10"), big, seeds), ExperimentError);
}

TEST_CASE("Pollaczek-Khinchine reference") {
  const ServiceTimeSpec svc{77, 50, 5};
  const double es = oracle::truncated_mean(77, 50, 5);
  const double es2 = oracle::truncated_second(77, 50, 5);
  for (double rho : {0.3, 0.5, 0.7, 0.9}) {
    const double rate = rho / es;
    CHECK(pollaczek_khinchine_wq(rate, svc) == doctest::Approx(oracle::pk_wait(rate, es, es2)).epsilon(1e-7));
  }
  CHECK(pollaczek_khinchine_wq(0.5 / es, svc) == doctest::Approx(53.49).epsilon(1e-3));
  CHECK(pollaczek_khinchine_wq(1e-12, svc) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK_THROWS_AS(pollaczek_khinchine_wq(1.0 / es, svc), ExperimentError);
  CHECK_THROWS_AS(pollaczek_khinchine_wq(1.2 / es, svc), ExperimentError);
}

TEST_CASE("M/G/1 simulation agrees with the analytic wait") {
  const ServiceTimeSpec svc{77, 50, 5};
  const double rate = 0.5 / truncated_normal_mean(svc);
  const Mg1Report r = validate_mg1(rate, svc, 50000, parse_seed_list("1..4"));
  CHECK(r.rho == doctest::Approx(0.5));
  CHECK(r.measured_vehicles > 100000);
  CHECK(r.relative_error <= 0.10);
  CHECK(r.analytic_wq_s == doctest::Approx(oracle::pk_wait(rate, r.mean_service_s, r.second_moment_s2)));
}

TEST_CASE("figure tables") {
  const auto seeds = parse_seed_list("1..3");
  const Figures f = reproduce_figures(seeds);
  CHECK(f.fig3.size() == 4 * seeds.size());
  CHECK(f.fig4.size() == 5);
  CHECK(f.fig4[0].scenario == "baseline");
  CHECK(f.fig4[0].advantage_s == 0.0);
  for (const Fig2Row& r : f.fig2) {
    CHECK(std::fmod(r.bin_start_s, 400.0) == 0.0);
    CHECK(r.count > 0);
  }
  for (const Fig4Row& r : f.fig4) CHECK(r.stats.n_runs == seeds.size());
}
