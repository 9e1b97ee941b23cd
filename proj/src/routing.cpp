#include "portsim/routing.hpp"

namespace portsim {

bool eligible_for_automated(VehicleKind kind, const RoutingPolicy& policy) {
  return policy.eligibility == Eligibility::AllVehicles || kind == VehicleKind::Car;
}

RouteDecision decide_route(RngStream& stream, std::uint32_t vehicle, VehicleKind kind, const RoutingPolicy& policy,
                           bool automated_available, double now_s) {
  RouteDecision d{vehicle, RouteKind::Manual, now_s};
  if (!automated_available || !eligible_for_automated(kind, policy)) return d;
  if (stream.next_uniform() < policy.adoption_fraction) d.chosen = RouteKind::Automated;
  return d;
}

std::optional<std::size_t> select_lane(std::span<const LaneOccupancy> lanes, double lane_capacity_pce,
                                       double vehicle_pce) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const LaneOccupancy& lane = lanes[i];
    if (!lane.open || lane.pce + vehicle_pce > lane_capacity_pce) continue;
    if (!best || lane.pce < lanes[*best].pce) best = i;
  }
  return best;
}

}  // namespace portsim
