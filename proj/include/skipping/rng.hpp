#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Core>
#include <boost/random/mersenne_twister.hpp>

namespace skipping {

/// Seedable, splittable random stream owned by exactly one chain.
///
/// The engine is a 64-bit Mersenne twister whose state is initialised from
/// splitmix64(seed). Child streams are derived with
///
///     child_seed = splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15))
///
/// so that the stream for restart `i` depends only on the parent seed and `i`,
/// never on scheduling. All variates are produced by boost.random
/// distributions, whose algorithms are fixed in source, so a seed reproduces
/// the same draws on every platform.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0);

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const { return seed_; }

  /// Deterministic child stream number `index`.
  RngStream split(std::uint64_t index) const;

  /// Uniform on the open interval (0, 1); zero is redrawn.
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double exponential(double rate);
  /// Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);
  double beta(double a, double b);
  double chi_square(double dof);

  Eigen::VectorXd standard_normal_vector(Eigen::Index dim);
  /// Uniformly distributed unit vector in R^dim.
  Eigen::VectorXd unit_vector(Eigen::Index dim);

 private:
  std::uint64_t seed_;
  boost::random::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace skipping
