#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, vehicle, purpose, counter), so the order in which the engine
// processes events never changes what any vehicle samples.

#include <cstdint>
#include <vector>

#include "portsim/scenario.hpp"

namespace portsim {

enum class Purpose : std::uint64_t {
  Service = 1,
  Route = 2,
  Class = 3,
  Arrivals = 4,
};

/// Ordinal reserved for streams that belong to the run rather than a vehicle.
inline constexpr std::uint64_t kRunStream = ~std::uint64_t{0};

/// SplitMix64 output finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t vehicle, Purpose purpose) noexcept;

  /// Draw number `counter()+1` of the SplitMix64 sequence started at key().
  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 bits of resolution.
  double next_uniform() noexcept;
  /// Box-Muller, cosine branch; consumes exactly two uniforms.
  double next_standard_normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline RngStream derive_stream(std::uint64_t seed, std::uint64_t vehicle, Purpose purpose) noexcept {
  return RngStream(seed, vehicle, purpose);
}

/// Normal(mean, sd) re-drawn until >= min_s. sd == 0 returns the mean without
/// consuming the stream.
double sample_truncated_normal(RngStream& stream, const ServiceTimeSpec& spec);

/// Analytic moments of the truncated normal described by `spec`.
double truncated_normal_mean(const ServiceTimeSpec& spec);
double truncated_normal_second_moment(const ServiceTimeSpec& spec);

/// Piecewise-constant-rate Poisson arrivals. Inside each segment gaps are
/// exponential at the segment rate; a gap crossing the segment end is
/// discarded and sampling restarts at the boundary.
std::vector<double> generate_arrivals(const FlowProfile& flow, std::uint64_t seed);

VehicleClass assign_class(RngStream& stream, double hgv_share, const VehicleClass& car,
                          const VehicleClass& hgv);

}  // namespace portsim
