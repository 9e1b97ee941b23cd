#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "portsim/experiments.hpp"

namespace portsim::detail {

/// Calls body(i) for i in [0, n). The parallel path hands indices to OpenMP
/// threads; callers write results into slot i so the merge order never
/// depends on scheduling. The first exception (by index) is rethrown.
template <typename Body>
void for_each_index(std::size_t n, Execution execution, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace portsim::detail
