#pragma once

// Replication runner, adoption sweeps, figure tables and the M/G/1 check.
//
// Replications are independent, so the parallel runner spreads seeds over
// OpenMP threads; the serial runner is the reference it must match bit for bit.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "portsim/metrics.hpp"
#include "portsim/scenario.hpp"

namespace portsim {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Execution { Serial, Parallel };

/// Seeds 1..20.
std::vector<std::uint64_t> default_seeds();

/// Parses "1..20", "3,5,8" or mixtures such as "1..4,10".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

std::vector<RunSummary> run_replications(const ScenarioSpec& spec, std::span<const std::uint64_t> seeds,
                                         Execution execution = Execution::Parallel);

struct ReplicationSet {
  std::vector<RunSummary> summaries;  // in the order of the seeds argument
  ReplicationStats stats;
  BinSeries bins;                     // trips of every run pooled, then binned
};

ReplicationSet replicate(const ScenarioSpec& spec, std::span<const std::uint64_t> seeds,
                         Execution execution = Execution::Parallel, double bin_width_s = 400.0);

struct SweepRow {
  std::string scenario;
  double fraction = 0.0;
  ReplicationSet runs;
  double advantage_s = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending fraction; rows[0] is the 0 baseline
};

SweepResult sweep_adoption(const ScenarioSpec& base, std::span<const double> fractions,
                           std::span<const std::uint64_t> seeds, Execution execution = Execution::Parallel);

struct Mg1Report {
  double arrival_rate = 0.0;  // vehicles per second
  double rho = 0.0;
  double mean_service_s = 0.0;
  double second_moment_s2 = 0.0;
  double analytic_wq_s = 0.0;
  double simulated_wq_s = 0.0;
  double relative_error = 0.0;
  std::size_t measured_vehicles = 0;
};

/// Pollaczek-Khinchine check on the single-kiosk calibration station. Each
/// seed simulates about n_vehicles arrivals; the first 20% of every run is
/// discarded as warm-up and the rest are pooled.
Mg1Report validate_mg1(double arrival_rate, const ServiceTimeSpec& service, std::size_t n_vehicles,
                       std::span<const std::uint64_t> seeds, Execution execution = Execution::Parallel);

double pollaczek_khinchine_wq(double arrival_rate, const ServiceTimeSpec& service);

struct Fig2Row {
  double fraction;
  double bin_start_s;
  std::size_t count;
  double mean_trip_s;
};

struct Fig3Row {
  double fraction;
  std::uint64_t seed;
  double mean_trip_s;
};

struct Fig4Row {
  std::string scenario;
  ReplicationStats stats;
  double advantage_s;
};

struct Figures {
  std::vector<Fig2Row> fig2;
  std::vector<Fig3Row> fig3;
  std::vector<Fig4Row> fig4;
};

/// fig2 (binned means) and fig3 (per-seed means) come from the all-vehicle
/// adoption sweep at 0, 10, 20 and 30%; fig4 compares baseline with the
/// cars-only presets.
Figures reproduce_figures(std::span<const std::uint64_t> seeds, Execution execution = Execution::Parallel);

}  // namespace portsim
