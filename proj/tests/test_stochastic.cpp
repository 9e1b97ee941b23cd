#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "portsim/stochastic.hpp"

using namespace portsim;

TEST_CASE("oracle values for the default service distribution") {
  // Frozen from the quadrature oracle; the closed form must agree.
  const double es = oracle::truncated_mean(77, 50, 5);
  const double es2 = oracle::truncated_second(77, 50, 5);
  CHECK(es == doctest::Approx(84.6459).epsilon(1e-5));
  CHECK(es2 == doctest::Approx(9055.97).epsilon(1e-5));

  const ServiceTimeSpec spec{77, 50, 5};
  CHECK(truncated_normal_mean(spec) == doctest::Approx(es).epsilon(1e-8));
  CHECK(truncated_normal_second_moment(spec) == doctest::Approx(es2).epsilon(1e-8));

  for (const ServiceTimeSpec s : {ServiceTimeSpec{30, 10, 0}, ServiceTimeSpec{20, 40, 15}, ServiceTimeSpec{5, 1, 4.5}}) {
    CHECK(truncated_normal_mean(s) == doctest::Approx(oracle::truncated_mean(s.mean_s, s.sd_s, s.min_s)).epsilon(1e-8));
    CHECK(truncated_normal_second_moment(s) ==
          doctest::Approx(oracle::truncated_second(s.mean_s, s.sd_s, s.min_s)).epsilon(1e-8));
  }
  CHECK(truncated_normal_mean(ServiceTimeSpec{77, 0, 5}) == 77.0);
}

TEST_CASE("streams are pure functions of seed, vehicle and purpose") {
  RngStream a = derive_stream(7, 3, Purpose::Service);
  RngStream b = derive_stream(7, 3, Purpose::Service);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
  CHECK(a.counter() == 100);

  auto first = [](RngStream s) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < 100; ++i) out.push_back(s.next_u64());
    return out;
  };
  CHECK(first(derive_stream(7, 3, Purpose::Service)) != first(derive_stream(7, 3, Purpose::Route)));
  CHECK(first(derive_stream(1, 3, Purpose::Service)) != first(derive_stream(2, 3, Purpose::Service)));
  CHECK(first(derive_stream(1, 3, Purpose::Service)) != first(derive_stream(1, 4, Purpose::Service)));
}

TEST_CASE("uniforms lie in [0,1) and have the right mean") {
  RngStream s(11, 0, Purpose::Class);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 3 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("truncated normal sampling") {
  SUBCASE("zero sd is exact") {
    RngStream s(1, 1, Purpose::Service);
    for (int i = 0; i < 10; ++i) CHECK(sample_truncated_normal(s, {77, 0, 5}) == 77.0);
  }

  SUBCASE("moments over 10^6 draws") {
    const ServiceTimeSpec spec{77, 50, 5};
    const double es = oracle::truncated_mean(77, 50, 5);
    const double var = oracle::truncated_second(77, 50, 5) - es * es;
    const int n = 1000000;
    double sum = 0, sum2 = 0, lo = 1e9;
    for (int i = 0; i < n; ++i) {
      RngStream s(2024, static_cast<std::uint64_t>(i), Purpose::Service);
      const double x = sample_truncated_normal(s, spec);
      lo = std::min(lo, x);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    const double sample_var = sum2 / n - mean * mean;
    CHECK(lo >= 5.0);
    CHECK(std::abs(mean - es) <= 0.2);
    CHECK(std::abs(mean - es) <= 3 * std::sqrt(var / n));
    const double m3 = oracle::truncated_normal_moment(77, 50, 5, 3);
    const double m4 = oracle::truncated_normal_moment(77, 50, 5, 4);
    const double es2 = var + es * es;
    const double central4 = m4 - 4 * es * m3 + 6 * es * es * es2 - 3 * es * es * es * es;
    CHECK(std::abs(sample_var - var) <= 3 * std::sqrt((central4 - var * var) / n));
  }

  SUBCASE("sample consumes a deterministic number of draws") {
    RngStream a(5, 9, Purpose::Service), b(5, 9, Purpose::Service);
    const double x = sample_truncated_normal(a, {77, 50, 5});
    const double y = sample_truncated_normal(b, {77, 50, 5});
    CHECK(x == y);
    CHECK(a.counter() == b.counter());
    CHECK(a.counter() % 2 == 0);
  }
}

TEST_CASE("arrival generation") {
  SUBCASE("no demand") {
    FlowProfile flow;
    flow.rates_veh_per_min.assign(45, 0.0);
    CHECK(generate_arrivals(flow, 1).empty());
  }

  SUBCASE("strictly increasing inside the horizon") {
    const FlowProfile flow;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto a = generate_arrivals(flow, seed);
      REQUIRE(!a.empty());
      CHECK(a.front() >= 0.0);
      CHECK(a.back() < flow.horizon_s());
      CHECK(std::adjacent_find(a.begin(), a.end(), [](double x, double y) { return !(x < y); }) == a.end());
    }
  }

  SUBCASE("piecewise rates respect segment boundaries") {
    FlowProfile flow;
    flow.rates_veh_per_min = {0.0, 30.0, 0.0};
    const auto a = generate_arrivals(flow, 3);
    REQUIRE(!a.empty());
    for (double t : a) {
      CHECK(t >= 120.0);
      CHECK(t < 240.0);
    }
  }

  SUBCASE("mean count over 200 seeds is lambda T") {
    const FlowProfile flow;
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) total += static_cast<double>(generate_arrivals(flow, seed).size());
    CHECK(std::abs(total / 200 - 540.0) <= 5.0);
  }

  SUBCASE("same seed, same arrivals") { CHECK(generate_arrivals(FlowProfile{}, 9) == generate_arrivals(FlowProfile{}, 9)); }
}

TEST_CASE("per-segment counts are Poisson(rate x 120 s)") {
  FlowProfile flow;
  flow.rates_veh_per_min.assign(10000, 6.0);
  const auto arrivals = generate_arrivals(flow, 77);
  std::vector<int> counts(flow.rates_veh_per_min.size(), 0);
  for (double t : arrivals) ++counts[static_cast<std::size_t>(t / flow.segment_s)];

  // Cells 0..k with tails pooled so each expected count is >= 5.
  const boost::math::poisson_distribution<double> poisson(12.0);
  const int lo = 4, hi = 21;  // cell "<= lo" and cell ">= hi"
  std::vector<double> observed(hi - lo + 1, 0.0);
  for (int c : counts) observed[std::clamp(c, lo, hi) - lo] += 1;
  double chi2 = 0;
  for (int k = lo; k <= hi; ++k) {
    double p;
    if (k == lo) p = boost::math::cdf(poisson, lo);
    else if (k == hi) p = 1.0 - boost::math::cdf(poisson, hi - 1);
    else p = boost::math::pdf(poisson, k);
    const double expected = p * static_cast<double>(counts.size());
    REQUIRE(expected >= 5.0);
    chi2 += (observed[k - lo] - expected) * (observed[k - lo] - expected) / expected;
  }
  const double df = static_cast<double>(hi - lo);  // cells - 1, rate known
  const double critical = boost::math::quantile(boost::math::chi_squared(df), 0.99);
  INFO("chi2 = " << chi2 << ", critical = " << critical);
  CHECK(chi2 < critical);
}

TEST_CASE("class assignment") {
  const VehicleClass car{VehicleKind::Car, 1.0}, hgv{VehicleKind::Hgv, 3.0};
  for (std::uint64_t v = 0; v < 1000; ++v) {
    RngStream s0(1, v, Purpose::Class), s1(1, v, Purpose::Class);
    CHECK(assign_class(s0, 0.0, car, hgv).kind == VehicleKind::Car);
    CHECK(assign_class(s1, 1.0, car, hgv).kind == VehicleKind::Hgv);
  }
  std::size_t hgvs = 0;
  const std::size_t n = 1000000;
  for (std::uint64_t v = 0; v < n; ++v) {
    RngStream s(3, v, Purpose::Class);
    hgvs += assign_class(s, 0.43, car, hgv).kind == VehicleKind::Hgv;
  }
  CHECK(std::abs(static_cast<double>(hgvs) / n - 0.43) <= 0.002);
}
