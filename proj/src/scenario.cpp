#include "portsim/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "portsim/stochastic.hpp"

namespace portsim {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

template <typename T>
auto* find_by_id(T& items, std::string_view id) {
  auto it = std::find_if(items.begin(), items.end(), [&](const auto& x) { return x.id == id; });
  return it == items.end() ? nullptr : &*it;
}

void check_service(const ServiceTimeSpec& s, const std::string& where, std::vector<std::string>& out) {
  if (!std::isfinite(s.mean_s) || !std::isfinite(s.sd_s) || !std::isfinite(s.min_s)) {
    out.push_back(where + ": service parameters must be finite");
    return;
  }
  if (s.min_s < 0) out.push_back(where + ": service.min_s must be >= 0, got " + fmt(s.min_s));
  if (s.mean_s <= s.min_s)
    out.push_back(where + ": service.mean_s (" + fmt(s.mean_s) + ") must exceed service.min_s (" + fmt(s.min_s) +
                  ")");
  if (s.sd_s < 0) out.push_back(where + ": service.sd_s must be >= 0, got " + fmt(s.sd_s));
}

// Largest footprint that can ever enter an element on the given route.
double max_pce_on(const ScenarioSpec& spec, RouteKind route) {
  double pce = spec.car.pce;
  bool hgvs = spec.hgv_share > 0.0;
  if (route == RouteKind::Automated && spec.policy.eligibility == Eligibility::CarsOnly) hgvs = false;
  if (hgvs) pce = std::max(pce, spec.hgv.pce);
  return pce;
}

void check_route(const ScenarioSpec& spec, const RouteSpec& route, RouteKind kind, std::vector<std::string>& out) {
  const std::string name = "route." + std::string(to_string(kind));
  const Network& net = spec.network;
  if (route.elements.empty()) {
    out.push_back(name + ": route is empty");
    return;
  }
  int stations = 0;
  std::set<std::string> seen;
  const double need = max_pce_on(spec, kind);
  for (const auto& id : route.elements) {
    if (!seen.insert(id).second) out.push_back(name + ": element '" + id + "' appears twice");
    if (id == net.entry) out.push_back(name + ": entry link '" + id + "' cannot be part of a route");
    if (const Link* link = net.find_link(id)) {
      if (link->capacity_pce < need)
        out.push_back(name + ": link '" + id + "' capacity " + fmt(link->capacity_pce) +
                      " PCE cannot hold a " + fmt(need) + " PCE vehicle");
    } else if (const ServiceStation* st = net.find_station(id)) {
      ++stations;
      if (st->capacity_pce < need)
        out.push_back(name + ": station '" + id + "' capacity " + fmt(st->capacity_pce) +
                      " PCE cannot hold a " + fmt(need) + " PCE vehicle");
      if (st->servers_open < 1 && st->discipline == Discipline::PerLaneShortestQueue) out.push_back(name + ": station '" + id + "' has no open servers");
    } else {
      out.push_back(name + ": unknown element '" + id + "'");
    }
  }
  if (stations != 1)
    out.push_back(name + ": must contain exactly one service station, found " + std::to_string(stations));
}

}  // namespace

double ServiceStation::total_capacity_pce() const {
  if (discipline == Discipline::SharedFifo) return capacity_pce;
  return capacity_pce * lane_count;
}

const Link* Network::find_link(std::string_view id) const { return find_by_id(links, id); }
const ServiceStation* Network::find_station(std::string_view id) const { return find_by_id(stations, id); }
Link* Network::find_link(std::string_view id) { return find_by_id(links, id); }
ServiceStation* Network::find_station(std::string_view id) { return find_by_id(stations, id); }

const RouteSpec* ScenarioSpec::route(RouteKind kind) const {
  if (kind == RouteKind::Manual) return &network.manual;
  return network.automated ? &*network.automated : nullptr;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : ScenarioError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::vector<std::string> validate(const ScenarioSpec& spec) {
  std::vector<std::string> out;

  if (spec.label.empty()) out.push_back("label: must not be empty");
  if (spec.label.find_first_of("\n#") != std::string::npos) out.push_back("label: must not contain '#' or newlines");

  if (spec.car.kind != VehicleKind::Car) out.push_back("class.car: kind must be Car");
  if (spec.hgv.kind != VehicleKind::Hgv) out.push_back("class.hgv: kind must be HGV");
  if (!(spec.car.pce > 0)) out.push_back("class.car.pce must be > 0, got " + fmt(spec.car.pce));
  if (!(spec.hgv.pce > 0)) out.push_back("class.hgv.pce must be > 0, got " + fmt(spec.hgv.pce));
  if (spec.car.pce > spec.hgv.pce) out.push_back("class.car.pce must not exceed class.hgv.pce");

  if (!(spec.hgv_share >= 0 && spec.hgv_share <= 1))
    out.push_back("hgv_share must be in [0,1], got " + fmt(spec.hgv_share));

  if (!(spec.flow.segment_s > 0) || !std::isfinite(spec.flow.segment_s))
    out.push_back("flow.segment_s must be a positive number, got " + fmt(spec.flow.segment_s));
  for (std::size_t i = 0; i < spec.flow.rates_veh_per_min.size(); ++i) {
    const double r = spec.flow.rates_veh_per_min[i];
    if (!(r >= 0) || !std::isfinite(r))
      out.push_back("flow.rates[" + std::to_string(i) + "] must be a finite rate >= 0, got " + fmt(r));
  }

  const double a = spec.policy.adoption_fraction;
  if (!(a >= 0 && a <= 1)) out.push_back("policy.adoption_fraction must be in [0,1], got " + fmt(a));
  if (a > 0 && !spec.network.automated)
    out.push_back("policy.adoption_fraction is " + fmt(a) + " but the network has no automated route");
  if (a == 0 && spec.network.automated)
    out.push_back("route.automated is present but policy.adoption_fraction is 0");

  std::set<std::string> ids;
  for (const Link& link : spec.network.links) {
    if (link.id.empty()) out.push_back("link with empty id");
    if (!ids.insert(link.id).second) out.push_back("duplicate element id '" + link.id + "'");
    if (!(link.free_flow_s >= 0) || !std::isfinite(link.free_flow_s))
      out.push_back("link." + link.id + ".free_flow_s must be >= 0, got " + fmt(link.free_flow_s));
    if (!(link.capacity_pce > 0))
      out.push_back("link." + link.id + ".capacity_pce must be > 0, got " + fmt(link.capacity_pce));
  }
  for (const ServiceStation& st : spec.network.stations) {
    const std::string name = "station." + st.id;
    if (st.id.empty()) out.push_back("station with empty id");
    if (!ids.insert(st.id).second) out.push_back("duplicate element id '" + st.id + "'");
    if (st.lane_count < 1) out.push_back(name + ".lanes must be >= 1, got " + std::to_string(st.lane_count));
    if (!(st.capacity_pce > 0)) out.push_back(name + ".capacity_pce must be > 0, got " + fmt(st.capacity_pce));
    if (st.servers_open < 0) out.push_back(name + ".servers must be >= 0");
    if (st.discipline == Discipline::PerLaneShortestQueue && st.servers_open > st.lane_count)
      out.push_back(name + ".servers (" + std::to_string(st.servers_open) + ") exceeds lanes (" +
                    std::to_string(st.lane_count) + ")");
    if (st.discipline == Discipline::SharedFifo && st.servers_open < 1)
      out.push_back(name + ".servers must be >= 1 for a shared FIFO station");
    check_service(st.service, name, out);
  }

  const Link* entry = spec.network.find_link(spec.network.entry);
  if (!entry) {
    out.push_back("network.entry: unknown link '" + spec.network.entry + "'");
  } else if (entry->capacity_pce < max_pce_on(spec, RouteKind::Manual)) {
    out.push_back("network.entry: capacity too small for the largest vehicle class");
  }

  check_route(spec, spec.network.manual, RouteKind::Manual, out);
  if (spec.network.automated) {
    check_route(spec, *spec.network.automated, RouteKind::Automated, out);
    for (const auto& id : spec.network.automated->elements) {
      const auto& m = spec.network.manual.elements;
      if (std::find(m.begin(), m.end(), id) != m.end())
        out.push_back("route.automated: element '" + id + "' is shared with the manual route");
    }
  }
  return out;
}

const ServiceStation& route_station(const ScenarioSpec& spec, RouteKind route) {
  const RouteSpec* r = spec.route(route);
  if (!r) throw ScenarioError("scenario '" + spec.label + "' has no " + std::string(to_string(route)) + " route");
  for (const auto& id : r->elements)
    if (const ServiceStation* st = spec.network.find_station(id)) return *st;
  throw ScenarioError("route " + std::string(to_string(route)) + " has no service station");
}

double effective_capacity(const ScenarioSpec& spec, RouteKind route) {
  const ServiceStation& st = route_station(spec, route);
  if (st.servers_open <= 0) return 0.0;
  return st.servers_open * 3600.0 / truncated_normal_mean(st.service);
}

double route_free_flow_s(const ScenarioSpec& spec, RouteKind route) {
  const RouteSpec* r = spec.route(route);
  if (!r) throw ScenarioError("scenario '" + spec.label + "' has no " + std::string(to_string(route)) + " route");
  double total = 0.0;
  if (const Link* entry = spec.network.find_link(spec.network.entry)) total += entry->free_flow_s;
  for (const auto& id : r->elements)
    if (const Link* link = spec.network.find_link(id)) total += link->free_flow_s;
  return total;
}

ScenarioSpec with_adoption(ScenarioSpec base, double fraction) {
  base.policy.adoption_fraction = fraction;
  if (fraction != 0.0 || !base.network.automated) return base;

  const RouteSpec automated = *base.network.automated;
  base.network.automated.reset();
  auto orphan = [&](const std::string& id) {
    const auto& m = base.network.manual.elements;
    return id != base.network.entry && std::find(m.begin(), m.end(), id) == m.end() &&
           std::find(automated.elements.begin(), automated.elements.end(), id) != automated.elements.end();
  };
  std::erase_if(base.network.links, [&](const Link& l) { return orphan(l.id); });
  std::erase_if(base.network.stations, [&](const ServiceStation& s) { return orphan(s.id); });
  return base;
}

std::uint64_t fingerprint(const FlowProfile& flow) {
  std::uint64_t h = mix64(std::bit_cast<std::uint64_t>(flow.segment_s));
  for (double r : flow.rates_veh_per_min) h = mix64(h ^ std::bit_cast<std::uint64_t>(r));
  return mix64(h ^ flow.rates_veh_per_min.size());
}

std::string_view to_string(VehicleKind kind) { return kind == VehicleKind::Car ? "car" : "hgv"; }

std::string_view to_string(RouteKind kind) { return kind == RouteKind::Manual ? "manual" : "automated"; }

std::string_view to_string(Discipline discipline) {
  return discipline == Discipline::SharedFifo ? "shared_fifo" : "per_lane";
}

}  // namespace portsim
