#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "skipping/rng.hpp"

namespace skipping {

/// State-space element of a chain.
using Point = Eigen::VectorXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(Eigen::Index expected, Eigen::Index got);
};

/// Raised when the skipping chain cannot be guaranteed to stop: an infinite
/// halting index exceeded its safety cap, so E[T_A ^ K] < inf does not hold
/// for this target and proposal.
class FiniteSkippingViolation : public Error {
 public:
  using Error::Error;
};

class NonFiniteProposal : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Unnormalised log-density. -inf is the only admissible non-finite value
/// and marks points outside the support.
///
/// Every call through operator() is counted. Copies share the counter, so a
/// runner that needs per-run counts should construct its own LogTarget.
class LogTarget {
 public:
  using Fn = std::function<double(const Point&)>;

  LogTarget(Eigen::Index dim, Fn eval);

  Eigen::Index dim() const { return dim_; }

  /// Evaluates the log-density; throws on dimension mismatch, NaN or +inf.
  double operator()(const Point& x) const;

  std::uint64_t evaluations() const { return evals_->load(std::memory_order_relaxed); }
  void reset_evaluations() const { evals_->store(0, std::memory_order_relaxed); }

 private:
  Eigen::Index dim_;
  Fn eval_;
  std::shared_ptr<std::atomic<std::uint64_t>> evals_;
};

bool in_support(const LogTarget& target, const Point& x);

/// log alpha for a Metropolis move between states with the given log-densities.
/// Returns 0 when the current state is outside the support.
double log_acceptance(double log_pi_x, double log_pi_z);

double log_acceptance(const LogTarget& target, const Point& x, const Point& z);

/// Draws U ~ Uniform(0,1) and accepts iff log U <= log_alpha. One uniform is
/// consumed on every call.
bool metropolis_accept(double log_alpha, RngStream& rng);

/// One transition of a chain.
struct StepRecord {
  Point state;     ///< X_n, the state the step started from
  Point proposal;  ///< Z, the point offered to the accept test
  /// T_A ^ K for skipping steps, 1 for random-walk steps.
  std::uint64_t skip_count = 1;
  bool accepted = false;
  double log_target_at_state = kNegInf;
  double log_target_at_proposal = kNegInf;

  const Point& next_state() const { return accepted ? proposal : state; }
  double next_log_target() const {
    return accepted ? log_target_at_proposal : log_target_at_state;
  }
};

/// Axis-aligned box D = [l_1, u_1] x ... x [l_d, u_d] (closed).
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Box() = default;
  /// Throws InvalidArgument unless lower < upper coordinatewise.
  Box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static Box cube(Eigen::Index dim, double lo, double hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Point& x) const;
  Point clamp(const Point& x) const;
  Eigen::VectorXd width() const { return upper - lower; }
  Point sample_uniform(RngStream& rng) const;
};

void check_dim(Eigen::Index expected, const Point& x);
bool all_finite(const Point& x);

}  // namespace skipping
