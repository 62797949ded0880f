#include "skipping/samplers.hpp"

#include <cmath>
#include <vector>

namespace skipping {

namespace {

using LogDensity = std::function<double(const Point&)>;

// Skipping chain against an arbitrary log-density (-inf off the support).
SkippingProposal skip_chain(const Point& x, const LogDensity& log_density,
                            const SkippingConfig& cfg, RngStream& rng) {
  const UnderlyingProposal& q = cfg.proposal;
  check_dim(q.dim(), x);

  Point phi;
  double r1 = 0.0;
  Point y;
  if (cfg.angular) {
    phi = cfg.angular->sample(x, rng);
    check_dim(q.dim(), phi);
    r1 = q.sample_radial_increment(phi, rng);
    y = x + phi * r1;
  } else {
    const Point offset = q.sample_offset(rng);
    r1 = offset.norm();
    if (!(r1 > 0.0)) throw NonFiniteProposal("proposal offset has zero length");
    phi = offset / r1;
    y = x + offset;
  }
  if (!y.allFinite()) throw NonFiniteProposal("initial proposal is not finite");

  const HaltingDraw halt = cfg.halting.sample(&phi, rng);

  std::optional<double> doubling_rate;
  if (cfg.use_doubling && !q.equal_increments() && !cfg.obstacles.empty())
    doubling_rate = q.exponential_rate();

  SkippingProposal out;
  out.phi = phi;
  Point z = std::move(y);
  std::uint64_t k = 1;
  double lz = log_density(z);
  // A ray that has left a convex set cannot come back into it.
  std::vector<bool> left(cfg.obstacles.size(), false);

  while (lz == kNegInf && k < halt.limit) {
    std::size_t obstacle = cfg.obstacles.size();
    if (doubling_rate) {
      for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
        if (cfg.obstacles[i].contains(z)) {
          if (left[i]) throw ConvexityViolation("skipping chain re-entered an obstacle declared convex");
          obstacle = i;
          break;
        }
      }
    }
    if (obstacle < cfg.obstacles.size()) {
      const auto r = traverse_convex(z, phi, ExponentialIncrements{*doubling_rate},
                                     cfg.obstacles[obstacle].contains, halt.limit - k, rng);
      z = r.point;
      k += r.steps;
      left[obstacle] = r.exited;
      lz = r.exited ? log_density(z) : kNegInf;
      continue;
    }
    const double r = q.equal_increments() ? r1 : q.sample_radial_increment(phi, rng);
    z += phi * r;
    ++k;
    if (!z.allFinite()) throw NonFiniteProposal("skipping chain left the representable range");
    lz = log_density(z);
  }

  if (lz == kNegInf && halt.infinite && k >= halt.limit) {
    throw FiniteSkippingViolation(
        "skipping chain did not enter the support within the safety cap of " +
        std::to_string(halt.limit) + " steps; E[T_A ^ K] < inf is not guaranteed");
  }

  out.z = std::move(z);
  out.skip_count = k;
  out.log_target_z = lz;
  return out;
}

StepRecord finish_step(const Point& x, double lx, SkippingProposal prop, double log_alpha,
                       RngStream& rng) {
  StepRecord rec;
  rec.state = x;
  rec.skip_count = prop.skip_count;
  rec.log_target_at_state = lx;
  rec.log_target_at_proposal = prop.log_target_z;
  rec.accepted = metropolis_accept(log_alpha, rng);
  rec.proposal = std::move(prop.z);
  return rec;
}

}  // namespace

SkippingProposal skipping_proposal(const Point& x, const LogTarget& target,
                                   const SkippingConfig& cfg, RngStream& rng) {
  check_dim(target.dim(), x);
  return skip_chain(x, [&](const Point& z) { return target(z); }, cfg, rng);
}

double angular_log_acceptance(double log_pi_x, double log_pi_z, const Point& x, const Point& z,
                              const Point& phi, const DirectionalDensity& qphi) {
  if (log_pi_x == kNegInf) return 0.0;
  if (log_pi_z == kNegInf) return kNegInf;
  const double q_forward = qphi.density(x, phi);
  const double q_reverse = qphi.density(z, -phi);
  if (!(q_forward > 0.0) || !(q_reverse > 0.0))
    throw InvalidArgument("angular density must be positive at both ends of the move");
  const double log_ratio =
      (log_pi_z + std::log(q_reverse)) - (log_pi_x + std::log(q_forward));
  return std::min(0.0, log_ratio);
}

double angular_log_acceptance(const LogTarget& target, const Point& x, const Point& z,
                              const Point& phi, const DirectionalDensity& qphi) {
  check_dim(target.dim(), phi);
  return angular_log_acceptance(target(x), target(z), x, z, phi, qphi);
}

StepRecord skip_step(const Point& x, double log_target_x, const LogTarget& target,
                     const SkippingConfig& cfg, RngStream& rng) {
  check_dim(target.dim(), x);
  SkippingProposal prop = skip_chain(x, [&](const Point& z) { return target(z); }, cfg, rng);
  const double log_alpha =
      cfg.angular ? angular_log_acceptance(log_target_x, prop.log_target_z, x, prop.z, prop.phi,
                                           *cfg.angular)
                  : log_acceptance(log_target_x, prop.log_target_z);
  return finish_step(x, log_target_x, std::move(prop), log_alpha, rng);
}

StepRecord skip_step(const Point& x, const LogTarget& target, const SkippingConfig& cfg,
                     RngStream& rng) {
  return skip_step(x, target(x), target, cfg, rng);
}

StepRecord rwm_step(const Point& x, double log_target_x, const LogTarget& target,
                    const UnderlyingProposal& proposal, RngStream& rng) {
  check_dim(target.dim(), x);
  check_dim(proposal.dim(), x);
  SkippingProposal prop;
  prop.z = x + proposal.sample_offset(rng);
  prop.skip_count = 1;
  prop.log_target_z = target(prop.z);
  const double log_alpha = log_acceptance(log_target_x, prop.log_target_z);
  return finish_step(x, log_target_x, std::move(prop), log_alpha, rng);
}

StepRecord rwm_step(const Point& x, const LogTarget& target, const UnderlyingProposal& proposal,
                    RngStream& rng) {
  return rwm_step(x, target(x), target, proposal, rng);
}

StepRecord mss_step(const Point& x, double f_x, const Objective& f, const Box& domain,
                    const SkippingConfig& cfg, RngStream& rng) {
  check_dim(domain.dim(), x);
  if (std::isnan(f_x)) throw InvalidArgument("objective value at the current state is NaN");
  const bool feasible = domain.contains(x) && f_x < kPosInf;
  const double level = feasible ? f_x : kPosInf;

  // Remember f at the most recent evaluation so the record can report it.
  Point last_point;
  double last_f = kPosInf;
  auto log_density = [&](const Point& z) -> double {
    if (!domain.contains(z)) return kNegInf;
    const double fz = f(z);
    if (std::isnan(fz)) throw InvalidArgument("objective returned NaN");
    last_point = z;
    last_f = fz;
    return fz < level ? 0.0 : kNegInf;
  };

  SkippingProposal prop = skip_chain(x, log_density, cfg, rng);
  double f_z = kPosInf;
  if (last_point.size() == prop.z.size() && last_point == prop.z) f_z = last_f;

  const double log_alpha = feasible ? log_acceptance(0.0, prop.log_target_z) : 0.0;
  prop.log_target_z = -f_z;
  return finish_step(x, -f_x, std::move(prop), log_alpha, rng);
}

StepRecord mss_step(const Point& x, const Objective& f, const Box& domain,
                    const SkippingConfig& cfg, RngStream& rng) {
  const double f_x = domain.contains(x) ? f(x) : kPosInf;
  return mss_step(x, f_x, f, domain, cfg, rng);
}

StepKernel skipping_kernel(LogTarget target, SkippingConfig cfg) {
  StepKernel k;
  k.log_target = [target](const Point& x) { return target(x); };
  k.step = [target, cfg = std::move(cfg)](const Point& x, double lx, RngStream& rng) {
    return skip_step(x, lx, target, cfg, rng);
  };
  return k;
}

StepKernel rwm_kernel(LogTarget target, UnderlyingProposal proposal) {
  StepKernel k;
  k.log_target = [target](const Point& x) { return target(x); };
  k.step = [target, proposal = std::move(proposal)](const Point& x, double lx, RngStream& rng) {
    return rwm_step(x, lx, target, proposal, rng);
  };
  return k;
}

StepKernel mss_kernel(Objective f, Box domain, SkippingConfig cfg) {
  StepKernel k;
  k.log_target = [f, domain](const Point& x) {
    if (!domain.contains(x)) return kNegInf;
    return -f(x);
  };
  k.step = [f, domain, cfg = std::move(cfg)](const Point& x, double lx, RngStream& rng) {
    return mss_step(x, -lx, f, domain, cfg, rng);
  };
  return k;
}

std::vector<Point> ChainResult::states() const {
  std::vector<Point> out;
  out.reserve(trace.size());
  for (const auto& r : trace) out.push_back(r.next_state());
  return out;
}

ChainResult run_chain(const Point& x0, const StepKernel& kernel, std::uint64_t n_steps,
                      RngStream& rng) {
  if (n_steps < 1) throw InvalidArgument("run_chain needs n_steps >= 1");
  ChainResult res;
  res.trace.reserve(n_steps);
  Point x = x0;
  double lx = kernel.log_target(x);
  std::uint64_t accepted = 0;
  std::uint64_t skipped = 0;
  for (std::uint64_t i = 0; i < n_steps; ++i) {
    StepRecord rec = kernel.step(x, lx, rng);
    if (rec.accepted) {
      ++accepted;
      if (rec.skip_count >= 2) ++skipped;
      x = rec.proposal;
      lx = rec.log_target_at_proposal;
    }
    res.trace.push_back(std::move(rec));
  }
  res.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(n_steps);
  res.skip_fraction = static_cast<double>(skipped) / static_cast<double>(n_steps);
  return res;
}

}  // namespace skipping
