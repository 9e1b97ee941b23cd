#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "portsim/scenario.hpp"
#include "portsim/stochastic.hpp"

namespace portsim {

struct RouteDecision {
  std::uint32_t vehicle = 0;
  RouteKind chosen = RouteKind::Manual;
  double committed_at_s = 0.0;
};

bool eligible_for_automated(VehicleKind kind, const RoutingPolicy& policy);

/// One draw from the vehicle's Route stream decides, so the outcome depends
/// only on (seed, vehicle) and never on congestion.
RouteDecision decide_route(RngStream& stream, std::uint32_t vehicle, VehicleKind kind,
                           const RoutingPolicy& policy, bool automated_available, double now_s);

struct LaneOccupancy {
  double pce = 0.0;
  bool open = true;
};

/// Least-occupied open lane (in PCE) with room for the vehicle; ties go to the
/// lowest index. nullopt when nothing fits.
std::optional<std::size_t> select_lane(std::span<const LaneOccupancy> lanes, double lane_capacity_pce,
                                       double vehicle_pce);

}  // namespace portsim
