#include <string>
#include <vector>

#include "portsim/scenario.hpp"
#include "portsim/stochastic.hpp"

namespace portsim {

namespace {

// Shared port geometry. Free-flow times and approach storage are calibration
// knobs; the automated approach is the shorter of the two.
ScenarioSpec port_base(std::string label) {
  ScenarioSpec s;
  s.label = std::move(label);
  s.network.entry = "filter";
  s.network.links = {
      {"filter", 300.0, 100.0},
      {"manual_approach", 60.0, 20.0},
  };
  s.network.stations = {
      {"manual_plaza", Discipline::PerLaneShortestQueue, 5, 10.0, 5, ServiceTimeSpec{}},
  };
  s.network.manual.elements = {"manual_approach", "manual_plaza"};
  return s;
}

ScenarioSpec with_automated(ScenarioSpec s, double adoption, Eligibility eligibility, double storage_pce,
                            int kiosks) {
  s.network.links.push_back({"auto_approach", 30.0, 10.0});
  s.network.stations.push_back({"auto_kiosks", Discipline::SharedFifo, 1, storage_pce, kiosks, ServiceTimeSpec{}});
  s.network.automated = RouteSpec{{"auto_approach", "auto_kiosks"}};
  s.policy.adoption_fraction = adoption;
  s.policy.eligibility = eligibility;
  return s;
}

// Single kiosk, unbounded storage, homogeneous Poisson arrivals at rho = 0.7,
// about 10^4 vehicles.
ScenarioSpec mg1_calibration() {
  ScenarioSpec s;
  s.label = "mg1_calibration";
  s.hgv_share = 0.0;
  s.network.entry = "arrivals";
  s.network.links = {{"arrivals", 0.0, kUnbounded}};
  s.network.stations = {{"kiosk", Discipline::SharedFifo, 1, kUnbounded, 1, ServiceTimeSpec{}}};
  s.network.manual.elements = {"kiosk"};
  const double rate_per_s = 0.7 / truncated_normal_mean(ServiceTimeSpec{});
  s.flow.segment_s = 1e4 / rate_per_s;
  s.flow.rates_veh_per_min = {rate_per_s * 60.0};
  return s;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "baseline",        "opt1_p10",        "opt1_p20",         "opt1_p30",
      "opt1_cars100",    "opt2_cars100_k5", "opt2_cars100_k3",  "opt2_cars100_k2",
      "stress_saturated", "mg1_calibration",
  };
  return names;
}

ScenarioSpec preset(std::string_view name) {
  const std::string n(name);
  if (n == "baseline") return port_base(n);
  if (n == "opt1_p10") return with_automated(port_base(n), 0.1, Eligibility::AllVehicles, 50.0, 5);
  if (n == "opt1_p20") return with_automated(port_base(n), 0.2, Eligibility::AllVehicles, 50.0, 5);
  if (n == "opt1_p30") return with_automated(port_base(n), 0.3, Eligibility::AllVehicles, 50.0, 5);
  if (n == "opt1_cars100") return with_automated(port_base(n), 1.0, Eligibility::CarsOnly, 50.0, 5);
  if (n == "opt2_cars100_k5") return with_automated(port_base(n), 1.0, Eligibility::CarsOnly, 25.0, 5);
  if (n == "opt2_cars100_k3") return with_automated(port_base(n), 1.0, Eligibility::CarsOnly, 25.0, 3);
  if (n == "opt2_cars100_k2") return with_automated(port_base(n), 1.0, Eligibility::CarsOnly, 25.0, 2);
  if (n == "stress_saturated") return with_automated(port_base(n), 1.0, Eligibility::CarsOnly, 25.0, 2);
  if (n == "mg1_calibration") return mg1_calibration();
  throw ScenarioError("unknown preset '" + n + "'");
}

}  // namespace portsim
