#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "portsim/engine.hpp"
#include "portsim/scenario.hpp"

namespace portsim {

/// Conservation, capacity, FIFO, timestamp order, free-flow lower bound,
/// cars-only eligibility, filter-lane order and bin/pooled mean agreement.
/// Returns one line per breach.
std::vector<std::string> check_run_invariants(const ScenarioSpec& spec, const RunResult& result);

struct InvariantSuiteReport {
  std::size_t runs = 0;
  std::vector<std::string> violations;  // prefixed with "<preset> seed <n>: "
  bool ok() const { return violations.empty(); }
};

/// Every catalog preset x every seed, run in parallel over OpenMP threads.
InvariantSuiteReport check_presets(std::span<const std::uint64_t> seeds);

}  // namespace portsim
