#pragma once

// Discrete-event core. Vehicles flow source -> entry link -> decision point
// -> route elements -> exit. Every element has PCE storage; a vehicle that
// does not fit downstream waits at the head of its current element and holds
// everyone behind it (spillback).

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "portsim/scenario.hpp"

namespace portsim {

enum class EventKind { Arrival, ReachHead, AdmissionRetry, ServiceStart, ServiceEnd };

struct Event {
  double time_s = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Arrival;
  std::uint32_t subject = 0;
  std::int32_t location = -1;  // element index, -1 for the source queue
};

/// Min-heap order: earlier time first, then earlier scheduling.
struct EventLater {
  bool operator()(const Event& a, const Event& b) const noexcept {
    if (a.time_s != b.time_s) return a.time_s > b.time_s;
    return a.seq > b.seq;
  }
};

enum class Admission { Admitted, Blocked };

/// Storage accounting shared by links and station queues.
class Occupancy {
 public:
  explicit Occupancy(double capacity_pce = kUnbounded) : capacity_(capacity_pce) {}

  bool fits(double pce) const noexcept { return occupancy_ + pce <= capacity_; }
  Admission try_admit(double pce) noexcept {
    if (!fits(pce)) return Admission::Blocked;
    occupancy_ += pce;
    return Admission::Admitted;
  }
  void release(double pce) noexcept {
    occupancy_ -= pce;
    if (std::abs(occupancy_) < 1e-9) occupancy_ = 0.0;
  }

  double occupancy() const noexcept { return occupancy_; }
  double capacity() const noexcept { return capacity_; }

 private:
  double capacity_;
  double occupancy_ = 0.0;
};

inline constexpr double kNoTime = std::numeric_limits<double>::quiet_NaN();

struct TripRecord {
  std::uint32_t vehicle_id = 0;
  VehicleKind kind = VehicleKind::Car;
  RouteKind route = RouteKind::Manual;
  bool diverted = false;
  double scheduled_arrival_s = 0.0;
  double entered_network_s = kNoTime;
  double reached_decision_s = kNoTime;
  double admitted_station_s = kNoTime;
  double service_start_s = kNoTime;
  double service_end_s = kNoTime;
  double exit_s = kNoTime;
  // Queue identity and ordering, for FIFO checks.
  std::int32_t station = -1;
  std::int32_t lane = -1;
  std::uint64_t admit_order = 0;
  std::uint64_t service_order = 0;
  std::uint64_t decision_exit_order = 0;  // order of leaving the entry link

  double trip_time_s() const { return exit_s - scheduled_arrival_s; }
};

struct QueueSample {
  double time_s = 0.0;
  double occupancy_pce = 0.0;
};

struct QueueSeries {
  std::string element;  // link id, station id, or "<station>/<lane>"
  double capacity_pce = kUnbounded;
  std::vector<QueueSample> samples;
};

struct TraceEntry {
  Event event;
  std::string location;
};

struct RunResult {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t flow_fingerprint = 0;
  std::size_t arrivals = 0;
  std::vector<TripRecord> trips;  // ordered by vehicle id (= arrival order)
  std::vector<QueueSeries> queues;
  std::uint64_t event_count = 0;
  std::vector<TraceEntry> trace;  // only with RunOptions::record_trace
};

struct RunOptions {
  bool record_queues = true;
  bool record_trace = false;
  double tick_s = 10.0;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulates arrivals over the flow horizon and keeps going until every
/// vehicle has exited. Throws SimulationError if validate(spec) is non-empty.
RunResult run(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& options = {});

/// Same as run() but with caller-supplied arrival times (sorted ascending).
RunResult run_with_arrivals(const ScenarioSpec& spec, std::uint64_t seed, std::vector<double> arrivals,
                            const RunOptions& options = {});

std::string_view to_string(EventKind kind);

}  // namespace portsim
