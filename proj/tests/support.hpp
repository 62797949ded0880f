#pragma once

#include <cmath>
#include <vector>

#include "skipping/samplers.hpp"
#include "skipping/targets.hpp"

namespace testsupport {

using skipping::Point;

inline Point p1(double v) {
  Point x(1);
  x << v;
  return x;
}

inline Point p2(double a, double b) {
  Point x(2);
  x << a, b;
  return x;
}

// Uniform on [0,1] u [2,3].
inline skipping::LogTarget two_intervals() {
  return skipping::interval_union_target({{0.0, 1.0}, {2.0, 3.0}});
}

// Chain on the two-interval target: Gaussian scale 0.5 (variance 0.25).
// Both ends of the complement are unbounded, so K must be finite here.
inline skipping::SkippingConfig two_interval_skipping() {
  return skipping::SkippingConfig{skipping::UnderlyingProposal::isotropic_gaussian(1, 0.5),
                                  skipping::HaltingIndex(skipping::DeterministicHalting{100}),
                                  false,
                                  {},
                                  std::nullopt};
}

// Direction density that always picks +e1 in one dimension.
inline skipping::DirectionalDensity forward_only() {
  return skipping::DirectionalDensity{
      [](const Point&, const Point& phi) { return phi[0] > 0 ? 1.0 : 1e-300; },
      [](const Point&, skipping::RngStream&) { return p1(1.0); }};
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace testsupport
