#include "skipping/core.hpp"

#include <cmath>

namespace skipping {

DimensionMismatch::DimensionMismatch(Eigen::Index expected, Eigen::Index got)
    : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
            std::to_string(got)) {}

void check_dim(Eigen::Index expected, const Point& x) {
  if (x.size() != expected) throw DimensionMismatch(expected, x.size());
}

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() < 1 || lower.size() != upper.size())
    throw InvalidArgument("box bounds must be non-empty and of equal length");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] < upper[i]))
      throw InvalidArgument("box bound " + std::to_string(i) + " must satisfy lower < upper");
  }
}

Box Box::cube(Eigen::Index dim, double lo, double hi) {
  return Box(Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi));
}

bool Box::contains(const Point& x) const {
  check_dim(dim(), x);
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Point Box::clamp(const Point& x) const {
  check_dim(dim(), x);
  return x.cwiseMax(lower).cwiseMin(upper);
}

Point Box::sample_uniform(RngStream& rng) const {
  Point x(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) x[i] = rng.uniform(lower[i], upper[i]);
  return x;
}

bool all_finite(const Point& x) { return x.allFinite(); }

LogTarget::LogTarget(Eigen::Index dim, Fn eval)
    : dim_(dim), eval_(std::move(eval)), evals_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (dim_ < 1) throw InvalidArgument("LogTarget dimension must be >= 1");
  if (!eval_) throw InvalidArgument("LogTarget requires an evaluation function");
}

double LogTarget::operator()(const Point& x) const {
  check_dim(dim_, x);
  evals_->fetch_add(1, std::memory_order_relaxed);
  const double v = eval_(x);
  if (std::isnan(v) || v == kPosInf) {
    throw Error("log-target returned " + std::string(std::isnan(v) ? "NaN" : "+inf"));
  }
  return v;
}

bool in_support(const LogTarget& target, const Point& x) { return target(x) > kNegInf; }

double log_acceptance(double log_pi_x, double log_pi_z) {
  if (log_pi_x == kNegInf) return 0.0;
  if (log_pi_z == kNegInf) return kNegInf;
  return std::min(0.0, log_pi_z - log_pi_x);
}

double log_acceptance(const LogTarget& target, const Point& x, const Point& z) {
  check_dim(target.dim(), z);
  return log_acceptance(target(x), target(z));
}

bool metropolis_accept(double log_alpha, RngStream& rng) {
  const double u = rng.uniform();
  return std::log(u) <= log_alpha;
}

}  // namespace skipping
