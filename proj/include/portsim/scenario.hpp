#pragma once

// Scenario data model: vehicle classes, network elements, flow profile,
// routing policy and the preset catalog used by the experiments.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace portsim {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class VehicleKind { Car, Hgv };

struct VehicleClass {
  VehicleKind kind = VehicleKind::Car;
  double pce = 1.0;  // storage consumed, in passenger-car equivalents

  bool operator==(const VehicleClass&) const = default;
};

struct ServiceTimeSpec {
  double mean_s = 77.0;
  double sd_s = 50.0;
  double min_s = 5.0;  // truncation floor; draws below it are re-drawn

  bool operator==(const ServiceTimeSpec&) const = default;
};

/// A point queue with storage: vehicles take free_flow_s to reach the head,
/// then leave in FIFO order once the downstream element admits them.
struct Link {
  std::string id;
  double free_flow_s = 0.0;
  double capacity_pce = kUnbounded;

  bool operator==(const Link&) const = default;
};

enum class Discipline { PerLaneShortestQueue, SharedFifo };

/// Queue-plus-servers element. For PerLaneShortestQueue every lane has its own
/// kiosk and capacity_pce is per lane; lanes at index >= servers_open are
/// closed. For SharedFifo there is one storage area of capacity_pce feeding
/// servers_open kiosks.
struct ServiceStation {
  std::string id;
  Discipline discipline = Discipline::SharedFifo;
  int lane_count = 1;
  double capacity_pce = kUnbounded;
  int servers_open = 1;
  ServiceTimeSpec service;

  double total_capacity_pce() const;

  bool operator==(const ServiceStation&) const = default;
};

struct RouteSpec {
  std::vector<std::string> elements;  // links and exactly one station, in travel order

  bool operator==(const RouteSpec&) const = default;
};

enum class RouteKind { Manual, Automated };

struct Network {
  std::vector<Link> links;
  std::vector<ServiceStation> stations;
  std::string entry;  // id of the filter lane feeding the decision point
  RouteSpec manual;
  std::optional<RouteSpec> automated;

  const Link* find_link(std::string_view id) const;
  const ServiceStation* find_station(std::string_view id) const;
  Link* find_link(std::string_view id);
  ServiceStation* find_station(std::string_view id);

  bool operator==(const Network&) const = default;
};

struct FlowProfile {
  double segment_s = 120.0;
  std::vector<double> rates_veh_per_min = std::vector<double>(45, 6.0);

  double horizon_s() const { return segment_s * static_cast<double>(rates_veh_per_min.size()); }

  bool operator==(const FlowProfile&) const = default;
};

enum class Eligibility { AllVehicles, CarsOnly };
enum class OnFull { Block, Divert };

struct RoutingPolicy {
  double adoption_fraction = 0.0;
  Eligibility eligibility = Eligibility::AllVehicles;
  OnFull on_full = OnFull::Block;

  bool operator==(const RoutingPolicy&) const = default;
};

struct ScenarioSpec {
  std::string label = "baseline";
  Network network;
  FlowProfile flow;
  double hgv_share = 0.43;
  RoutingPolicy policy;
  VehicleClass car{VehicleKind::Car, 1.0};
  VehicleClass hgv{VehicleKind::Hgv, 3.0};

  const VehicleClass& vehicle_class(VehicleKind kind) const {
    return kind == VehicleKind::Car ? car : hgv;
  }
  const RouteSpec* route(RouteKind kind) const;

  bool operator==(const ScenarioSpec&) const = default;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ScenarioError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Every invariant breach as a human-readable line; empty means runnable.
std::vector<std::string> validate(const ScenarioSpec& spec);

ScenarioSpec parse_scenario(std::string_view text);
std::string serialize_scenario(const ScenarioSpec& spec);

/// Named scenarios; throws ScenarioError for names outside the catalog.
ScenarioSpec preset(std::string_view name);
const std::vector<std::string>& preset_names();

/// Analytic saturation throughput of the route's station, vehicles per hour.
double effective_capacity(const ScenarioSpec& spec, RouteKind route);

/// The station on a route; throws ScenarioError if the route or station is absent.
const ServiceStation& route_station(const ScenarioSpec& spec, RouteKind route);

/// Free-flow seconds from network entry to exit along a route, excluding service.
double route_free_flow_s(const ScenarioSpec& spec, RouteKind route);

/// Copy of `base` with a new adoption fraction. A zero fraction removes the
/// automated route and every element only it used.
ScenarioSpec with_adoption(ScenarioSpec base, double fraction);

/// Stable 64-bit digest of a flow profile, used to check comparability.
std::uint64_t fingerprint(const FlowProfile& flow);

std::string_view to_string(VehicleKind kind);
std::string_view to_string(RouteKind kind);
std::string_view to_string(Discipline discipline);

}  // namespace portsim
