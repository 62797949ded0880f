#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "skipping/core.hpp"
#include "skipping/proposals.hpp"
#include "skipping/samplers.hpp"

namespace skipping {

struct KnownOptimum {
  Point point;
  double value = 0.0;
};

/// min f(x) over the box. f may return +inf to mark infeasible points.
struct BoxProblem {
  Objective f;
  Box bounds;
  std::optional<KnownOptimum> known_optimum;
};

BoxProblem eggholder_problem();

struct NelderMeadOptions {
  double edge_fraction = 0.01;  ///< initial simplex edge, as a fraction of box width
  double f_tolerance = 1e-8;    ///< stop when max f - min f over the simplex falls below
  int max_iterations = 500;
};

struct LocalSearchResult {
  Point point;
  double value = kPosInf;
  std::uint64_t evals = 0;
  int iterations = 0;
  /// No finite value found near the start; point is the (clamped) start.
  bool infeasible = false;
};

/// Nelder-Mead on f(clamp(x)). The returned point lies in the box and its
/// value never exceeds f at the clamped start.
LocalSearchResult local_search(const Point& x0, const BoxProblem& prob,
                               const NelderMeadOptions& opts = {});

inline constexpr double kDefaultBasinTolerance = 1.0;

/// True iff local_search from x ends within tol (Euclidean) of the known optimum.
bool in_basin_of(const Point& x, const BoxProblem& prob, double tol = kDefaultBasinTolerance);

struct OptRunReport {
  Point start;
  Point final_point;
  double final_value = kPosInf;
  double distance_to_optimum = 0.0;
  bool in_basin = false;
  /// Objective calls made by the method itself (scoring excluded).
  std::uint64_t function_evals = 0;
  double wall_time_s = 0.0;
  std::uint64_t accepted_moves = 0;
  /// Objective at the current point after each iteration.
  std::vector<double> value_history;
};

struct VanillaMultistart {};

/// m RWM steps on exp(-f/T) restricted to the box.
struct RwmAugmented {
  std::uint64_t m = 100;
  UnderlyingProposal proposal;
  double temperature = 1.0;
};

/// m MSS steps.
struct MssAugmented {
  std::uint64_t m = 100;
  SkippingConfig cfg;
};

using MultistartMode = std::variant<VanillaMultistart, RwmAugmented, MssAugmented>;

/// N uniform starts in the box, each optionally evolved by a chain. Run i
/// uses rng.split(i), so results do not depend on `threads`.
std::vector<OptRunReport> multistart(const BoxProblem& prob, std::size_t n,
                                     const MultistartMode& mode, const RngStream& rng,
                                     unsigned threads = 1);

/// Metropolis acceptance of local minima at temperature T after a uniform
/// perturbation of half-width w per coordinate.
struct ClassicHopping {
  double half_width = 1.7320508075688772;
  double temperature = 1.0;
};

/// Accepts only strictly improving local minima.
struct MonotonicHopping {
  double half_width = 1.7320508075688772;
};

/// Local search followed by one MSS step from the local minimum.
struct MssHopping {
  SkippingConfig cfg;
};

using HoppingMode = std::variant<ClassicHopping, MonotonicHopping, MssHopping>;

OptRunReport basin_hopping(const BoxProblem& prob, const Point& x0, const HoppingMode& mode,
                           std::uint64_t n_iters, RngStream& rng);

/// basin_hopping from N uniform starts; run i draws its start and its moves
/// from rng.split(i).
std::vector<OptRunReport> basin_hopping_restarts(const BoxProblem& prob, std::size_t n,
                                                 const HoppingMode& mode, std::uint64_t n_iters,
                                                 const RngStream& rng, unsigned threads = 1);

/// Uniform half-width with the same standard deviation as N(0, sigma^2).
inline double matched_uniform_half_width(double sigma) { return sigma * 1.7320508075688772; }

}  // namespace skipping
