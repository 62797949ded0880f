#include <doctest.h>

#include <cmath>
#include <vector>

#include "skipping/diagnostics.hpp"
#include "skipping/doubling.hpp"
#include "support.hpp"

using namespace skipping;
using testsupport::mean;
using testsupport::p1;

namespace {

LogTarget outside_gap(double len) {
  return LogTarget(1, [len](const Point& x) { return (x[0] <= 0.0 || x[0] >= len) ? 0.0 : kNegInf; });
}

// Sequential oracle: Z_k = x + S_k with Exp(rate) increments.
std::pair<std::uint64_t, double> sequential_entry(double x, double len, double rate, RngStream& rng) {
  double z = x;
  std::uint64_t k = 0;
  do {
    z += rng.exponential(rate);
    ++k;
  } while (z > 0.0 && z < len);
  return {k, z};
}

}  // namespace

TEST_CASE("gamma partial sums have the right mean") {
  RngStream rng(1);
  const int n = 100000;
  std::vector<double> one, ten;
  for (int i = 0; i < n; ++i) {
    one.push_back(gamma_partial_sum(1, ExponentialIncrements{2.0}, rng));
    ten.push_back(gamma_partial_sum(10, ExponentialIncrements{1.0}, rng));
  }
  CHECK(std::abs(mean(one) - 0.5) < 0.01);
  CHECK(std::abs(mean(ten) - 10.0) < 0.1);
}

TEST_CASE("bridges stay inside the conditioning total") {
  RngStream rng(2);
  const int n = 100000;
  std::vector<double> s1;
  for (int i = 0; i < n; ++i) {
    const double b = bridge_partial_sum(1, 2.0, ExponentialIncrements{1.0}, rng);
    REQUIRE(b > 0.0);
    REQUIRE(b < 2.0);
    s1.push_back(b);
    const double m = bridge_partial_sum(3, 10, 7.0, rng);
    REQUIRE(m > 0.0);
    REQUIRE(m < 7.0);
  }
  CHECK(std::abs(mean(s1) - 1.0) < 0.02);
}

TEST_CASE("bridge of a gamma total marginalises to an exponential") {
  RngStream rng(3);
  const ExponentialIncrements inc{1.5};
  std::vector<double> bridged, direct;
  for (int i = 0; i < 20000; ++i) {
    const double s2 = gamma_partial_sum(2, inc, rng);
    bridged.push_back(bridge_partial_sum(1, s2, inc, rng));
    direct.push_back(rng.exponential(1.5));
  }
  CHECK(ks_two_sample(bridged, direct) > 0.01);
}

TEST_CASE("entry at the first step uses no bridge samples") {
  // Gap of length 1e-9: the first increment almost surely clears it.
  const LogTarget t = outside_gap(1e-9);
  RngStream rng(4);
  const auto r = doubling_find_entry(p1(0.0), p1(1.0), ExponentialIncrements{1.0}, t, rng);
  CHECK(r.t_a == 1);
  CHECK(r.partial_sum_samples == 1);
}

TEST_CASE("doubling matches the sequential oracle in law") {
  for (double len : {5.0, 50.0, 500.0}) {
    CAPTURE(len);
    const LogTarget t = outside_gap(len);
    RngStream a(5);
    RngStream b(6);
    std::vector<double> ta_d, z_d, ta_s, z_s;
    double samples = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const auto r = doubling_find_entry(p1(0.0), p1(1.0), ExponentialIncrements{1.0}, t, a);
      REQUIRE(r.z[0] >= len);
      ta_d.push_back(static_cast<double>(r.t_a));
      z_d.push_back(r.z[0]);
      samples += static_cast<double>(r.partial_sum_samples);
      const auto [k, z] = sequential_entry(0.0, len, 1.0, b);
      ta_s.push_back(static_cast<double>(k));
      z_s.push_back(z);
    }
    CHECK(ks_two_sample(ta_d, ta_s) > 0.01);
    CHECK(ks_two_sample(z_d, z_s) > 0.01);
    CHECK(samples / n <= 2.0 * std::log2(mean(ta_s)) + 4.0);
  }
}

TEST_CASE("traversal stops at max_steps when still inside") {
  RngStream rng(7);
  auto inside = [](const Point& z) { return z[0] > 0.0 && z[0] < 1e6; };
  const auto r = traverse_convex(p1(0.0), p1(1.0), ExponentialIncrements{1.0}, inside, 100, rng);
  CHECK(r.steps == 100);
  CHECK_FALSE(r.exited);
}

TEST_CASE("the exponent cap bounds the forward search") {
  RngStream rng(8);
  auto forever = [](const Point&) { return true; };
  CHECK_THROWS(traverse_convex(p1(0.0), p1(1.0), ExponentialIncrements{1.0}, forever,
                               std::numeric_limits<std::uint64_t>::max(), rng, 10));
}
