#include "portsim/stochastic.hpp"

#include <cmath>
#include <numbers>

namespace portsim {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;  // SplitMix64 increment

// Standard normal density and upper tail.
double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Inverse Mills ratio at the standardized truncation point.
double hazard(const ServiceTimeSpec& s) {
  const double alpha = (s.min_s - s.mean_s) / s.sd_s;
  return pdf(alpha) / upper_tail(alpha);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t vehicle, Purpose purpose) noexcept {
  std::uint64_t k = mix64(seed + kGamma);
  k = mix64(k ^ (vehicle * kGamma + 1));
  k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * kGamma + 2));
  key_ = k;
}

std::uint64_t RngStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RngStream::next_uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::next_standard_normal() noexcept {
  const double u1 = 1.0 - next_uniform();  // (0, 1]
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_truncated_normal(RngStream& stream, const ServiceTimeSpec& spec) {
  if (spec.sd_s == 0.0) return spec.mean_s;
  while (true) {
    const double x = spec.mean_s + spec.sd_s * stream.next_standard_normal();
    if (x >= spec.min_s) return x;
  }
}

double truncated_normal_mean(const ServiceTimeSpec& spec) {
  if (spec.sd_s == 0.0) return spec.mean_s;
  return spec.mean_s + spec.sd_s * hazard(spec);
}

double truncated_normal_second_moment(const ServiceTimeSpec& spec) {
  const double mean = truncated_normal_mean(spec);
  if (spec.sd_s == 0.0) return mean * mean;
  const double alpha = (spec.min_s - spec.mean_s) / spec.sd_s;
  const double h = hazard(spec);
  const double variance = spec.sd_s * spec.sd_s * (1.0 + alpha * h - h * h);
  return variance + mean * mean;
}

std::vector<double> generate_arrivals(const FlowProfile& flow, std::uint64_t seed) {
  std::vector<double> out;
  RngStream stream(seed, kRunStream, Purpose::Arrivals);
  for (std::size_t i = 0; i < flow.rates_veh_per_min.size(); ++i) {
    const double per_s = flow.rates_veh_per_min[i] / 60.0;
    if (per_s <= 0.0) continue;
    const double start = flow.segment_s * static_cast<double>(i);
    const double end = start + flow.segment_s;
    double t = start;
    while (true) {
      t += -std::log1p(-stream.next_uniform()) / per_s;
      if (t >= end) break;
      if (out.empty() || t > out.back()) out.push_back(t);
    }
  }
  return out;
}

VehicleClass assign_class(RngStream& stream, double hgv_share, const VehicleClass& car, const VehicleClass& hgv) {
  return stream.next_uniform() < hgv_share ? hgv : car;
}

}  // namespace portsim
