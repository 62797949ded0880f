#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "skipping/core.hpp"
#include "skipping/doubling.hpp"
#include "skipping/proposals.hpp"

namespace skipping {

using Objective = std::function<double(const Point&)>;

struct SkippingConfig {
  UnderlyingProposal proposal;
  HaltingIndex halting;
  /// Cross the listed obstacles with the doubling trick when the radial
  /// increments are exponential and not tied (equal-increment mode off).
  bool use_doubling = false;
  std::vector<ConvexObstacle> obstacles;
  /// When set, directions are drawn from this density and the accept test
  /// carries the angular-density ratio.
  std::optional<DirectionalDensity> angular;
};

struct SkippingProposal {
  Point z;
  std::uint64_t skip_count = 1;  ///< T_A ^ K
  double log_target_z = kNegInf;
  Point phi;
};

/// Draws Y = x + offset and, while Z_k is outside the support and k < K,
/// extends Z_{k+1} = Z_k + phi * R_{k+1}.
SkippingProposal skipping_proposal(const Point& x, const LogTarget& target,
                                   const SkippingConfig& cfg, RngStream& rng);

/// One step of the skipping sampler from x whose log-density is already known.
StepRecord skip_step(const Point& x, double log_target_x, const LogTarget& target,
                     const SkippingConfig& cfg, RngStream& rng);
StepRecord skip_step(const Point& x, const LogTarget& target, const SkippingConfig& cfg,
                     RngStream& rng);

/// min(0, [log pi(z) + log q_phi(z, -phi)] - [log pi(x) + log q_phi(x, phi)]),
/// and 0 when x is outside the support.
double angular_log_acceptance(const LogTarget& target, const Point& x, const Point& z,
                              const Point& phi, const DirectionalDensity& qphi);
double angular_log_acceptance(double log_pi_x, double log_pi_z, const Point& x, const Point& z,
                              const Point& phi, const DirectionalDensity& qphi);

StepRecord rwm_step(const Point& x, double log_target_x, const LogTarget& target,
                    const UnderlyingProposal& proposal, RngStream& rng);
StepRecord rwm_step(const Point& x, const LogTarget& target, const UnderlyingProposal& proposal,
                    RngStream& rng);

/// One monotonic skipping sampler step. The support is the strict sublevel
/// set {z in D : f(z) < f(x)} and the target is uniform on it, so a proposal
/// is accepted iff it lands there. From an infeasible x (outside D, or
/// f(x) = +inf) the support is the feasible part of D and every halted
/// proposal is accepted.
///
/// log_target fields of the record hold -f, or -inf where f is infinite or
/// was not evaluated.
StepRecord mss_step(const Point& x, double f_x, const Objective& f, const Box& domain,
                    const SkippingConfig& cfg, RngStream& rng);
StepRecord mss_step(const Point& x, const Objective& f, const Box& domain,
                    const SkippingConfig& cfg, RngStream& rng);

/// A transition kernel together with the log-density it uses for the initial
/// state.
struct StepKernel {
  std::function<double(const Point&)> log_target;
  std::function<StepRecord(const Point& x, double log_target_x, RngStream& rng)> step;
};

StepKernel skipping_kernel(LogTarget target, SkippingConfig cfg);
StepKernel rwm_kernel(LogTarget target, UnderlyingProposal proposal);
StepKernel mss_kernel(Objective f, Box domain, SkippingConfig cfg);

struct ChainResult {
  std::vector<StepRecord> trace;
  double acceptance_rate = 0.0;
  /// Accepted steps with skip_count >= 2, as a fraction of all steps.
  double skip_fraction = 0.0;

  /// States after each step (X_1, ..., X_n) as rows.
  std::vector<Point> states() const;
};

ChainResult run_chain(const Point& x0, const StepKernel& kernel, std::uint64_t n_steps,
                      RngStream& rng);

}  // namespace skipping
