#include "skipping/doubling.hpp"

#include <algorithm>
#include <limits>

#include "skipping/proposals.hpp"

namespace skipping {

namespace {

void check_rate(const ExponentialIncrements& inc) {
  if (!(inc.rate > 0.0)) throw InvalidArgument("increment rate must be > 0");
}

}  // namespace

double gamma_partial_sum(std::uint64_t k, const ExponentialIncrements& inc, RngStream& rng) {
  check_rate(inc);
  if (k < 1) throw InvalidArgument("partial sum index must be >= 1");
  return rng.gamma(static_cast<double>(k), inc.rate);
}

double bridge_partial_sum(std::uint64_t m, std::uint64_t n, double total, RngStream& rng) {
  if (m < 1 || m >= n) throw InvalidArgument("bridge requires 1 <= m < n");
  if (!(total > 0.0)) throw InvalidArgument("bridge total must be > 0");
  const double b = rng.beta(static_cast<double>(m), static_cast<double>(n - m));
  return total * b;
}

double bridge_partial_sum(std::uint64_t k, double total_2k, const ExponentialIncrements& inc,
                          RngStream& rng) {
  check_rate(inc);
  return bridge_partial_sum(k, 2 * k, total_2k, rng);
}

TraversalResult traverse_convex(const Point& start, const Point& phi,
                                const ExponentialIncrements& inc,
                                const std::function<bool(const Point&)>& inside,
                                std::uint64_t max_steps, RngStream& rng, int exponent_cap) {
  check_rate(inc);
  check_unit(phi);
  if (max_steps < 1) throw InvalidArgument("traversal needs max_steps >= 1");

  TraversalResult out;
  auto at = [&](double s) -> Point { return start + phi * s; };

  // Forward search over indices 2^e - 1 (clamped to max_steps).
  std::uint64_t lo = 0;
  double lo_sum = 0.0;
  std::uint64_t hi = 0;
  double hi_sum = 0.0;
  for (int e = 1;; ++e) {
    if (e > exponent_cap)
      throw Error("doubling forward search exceeded 2^" + std::to_string(exponent_cap) + " steps");
    std::uint64_t idx = (e >= 64) ? max_steps : (std::uint64_t{1} << e) - 1;
    if (idx > max_steps) idx = max_steps;
    const double sum = lo_sum + gamma_partial_sum(idx - lo, inc, rng);
    ++out.partial_sum_samples;
    const Point z = at(sum);
    if (!z.allFinite()) throw NonFiniteProposal("doubling produced a non-finite point");
    const bool in = inside(z);
    if (!in) {
      hi = idx;
      hi_sum = sum;
      break;
    }
    lo = idx;
    lo_sum = sum;
    if (idx == max_steps) {
      out.point = z;
      out.steps = idx;
      out.exited = false;
      return out;
    }
  }

  // Bisection on (lo, hi]: Z_lo inside (or the start), Z_hi outside.
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const double sum = lo_sum + bridge_partial_sum(mid - lo, hi - lo, hi_sum - lo_sum, rng);
    ++out.partial_sum_samples;
    const bool in = inside(at(sum));
    if (in) {
      lo = mid;
      lo_sum = sum;
    } else {
      hi = mid;
      hi_sum = sum;
    }
  }
  out.point = at(hi_sum);
  out.steps = hi;
  out.exited = true;
  return out;
}

EntryResult doubling_find_entry(const Point& x, const Point& phi, const ExponentialIncrements& inc,
                                const LogTarget& target, RngStream& rng, int exponent_cap) {
  check_dim(target.dim(), x);
  check_dim(target.dim(), phi);
  auto outside_support = [&](const Point& z) { return !in_support(target, z); };
  const auto r = traverse_convex(x, phi, inc, outside_support,
                                 std::numeric_limits<std::uint64_t>::max(), rng, exponent_cap);
  return EntryResult{r.point, r.steps, r.partial_sum_samples};
}

}  // namespace skipping
