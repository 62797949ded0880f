#pragma once

#include <cstdint>
#include <functional>

#include "skipping/core.hpp"

namespace skipping {

/// Exponential radial increments R_i ~ Exp(rate). Partial sums are Gamma and
/// bridges between partial sums are scaled Beta, both sampled directly.
struct ExponentialIncrements {
  double rate = 1.0;
};

/// Convex subset of the complement of the support. Convexity is the
/// caller's promise; the sampler raises ConvexityViolation when a ray
/// re-enters an obstacle it has already left.
struct ConvexObstacle {
  std::function<bool(const Point&)> contains;
};

class ConvexityViolation : public Error {
 public:
  using Error::Error;
};

inline constexpr int kDefaultExponentCap = 60;

/// S_k = R_1 + ... + R_k ~ Gamma(k, rate).
double gamma_partial_sum(std::uint64_t k, const ExponentialIncrements& inc, RngStream& rng);

/// S_k given S_{2k} = total_2k.
double bridge_partial_sum(std::uint64_t k, double total_2k, const ExponentialIncrements& inc,
                          RngStream& rng);

/// S_m given S_n = total for m < n: total * Beta(m, n - m).
double bridge_partial_sum(std::uint64_t m, std::uint64_t n, double total, RngStream& rng);

struct TraversalResult {
  Point point;                  ///< Z at the returned index
  std::uint64_t steps = 0;      ///< index reached, counted from the start point
  bool exited = false;          ///< point lies outside the obstacle
  std::uint64_t partial_sum_samples = 0;
};

/// Runs the skipping chain Z_k = start + phi * S_k from inside a convex
/// region and returns the first k with Z_k outside it, or Z_{max_steps} if the
/// chain has not left by then. Searches Z_1, Z_3, Z_7, ... forward, then
/// bisects the last bracket with Beta bridges.
TraversalResult traverse_convex(const Point& start, const Point& phi,
                                const ExponentialIncrements& inc,
                                const std::function<bool(const Point&)>& inside,
                                std::uint64_t max_steps, RngStream& rng,
                                int exponent_cap = kDefaultExponentCap);

struct EntryResult {
  Point z;
  std::uint64_t t_a = 1;
  std::uint64_t partial_sum_samples = 0;
};

/// Entry time T_A and entry point of the skipping chain from x along phi,
/// assuming the complement of the support is convex along the ray.
EntryResult doubling_find_entry(const Point& x, const Point& phi, const ExponentialIncrements& inc,
                                const LogTarget& target, RngStream& rng,
                                int exponent_cap = kDefaultExponentCap);

}  // namespace skipping
