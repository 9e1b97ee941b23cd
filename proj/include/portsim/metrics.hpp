#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "portsim/engine.hpp"

namespace portsim {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BinKey { ScheduledArrival, Exit };

struct BinRow {
  double bin_start_s = 0.0;
  std::size_t count = 0;
  double mean_trip_s = 0.0;
};

/// Non-empty bins only, ascending by start.
struct BinSeries {
  double bin_width_s = 400.0;
  std::vector<BinRow> bins;
};

BinSeries bin_means(std::span<const TripRecord> records, double bin_width_s,
                    BinKey key = BinKey::ScheduledArrival);

struct RouteMean {
  std::size_t count = 0;
  double mean_trip_s = 0.0;
};

struct RunSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t flow_fingerprint = 0;
  std::size_t n_vehicles = 0;
  double mean_trip_s = 0.0;  // pooled over both routes
  double p95_trip_s = 0.0;   // nearest rank
  double max_queue_pce = 0.0;
  RouteMean manual;
  RouteMean automated;
};

RunSummary summarize_run(const RunResult& result);

/// Nearest-rank percentile of an unsorted sample; 0 for an empty one.
double nearest_rank(std::vector<double> values, double percentile);

struct ReplicationStats {
  std::string scenario;
  std::uint64_t flow_fingerprint = 0;
  std::size_t n_runs = 0;
  double mean_of_means_s = 0.0;
  double sd_of_means_s = 0.0;  // sample standard deviation, 0 for one run
  double min_mean_s = 0.0;
  double max_mean_s = 0.0;
};

/// Statistics of the per-run mean trip times. Inputs are put into ascending
/// seed order before accumulating, so any permutation gives identical bits.
ReplicationStats aggregate(std::span<const RunSummary> summaries);

/// base - variant in seconds; positive means the variant is faster.
double advantage(const ReplicationStats& base, const ReplicationStats& variant);

std::vector<QueueSample> queue_series(const RunResult& result, std::string_view element);

}  // namespace portsim
