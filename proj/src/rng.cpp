#include "skipping/rng.hpp"

#include <boost/random/beta_distribution.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace skipping {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(index + 0x9E3779B97F4A7C15ULL)));
}

double RngStream::uniform() {
  boost::random::uniform_01<double> dist;
  double u = dist(engine_);
  while (u <= 0.0) u = dist(engine_);
  return u;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double RngStream::exponential(double rate) {
  boost::random::exponential_distribution<double> dist(rate);
  return dist(engine_);
}

double RngStream::gamma(double shape, double rate) {
  boost::random::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(engine_);
}

double RngStream::beta(double a, double b) {
  boost::random::beta_distribution<double> dist(a, b);
  return dist(engine_);
}

double RngStream::chi_square(double dof) {
  boost::random::chi_squared_distribution<double> dist(dof);
  return dist(engine_);
}

Eigen::VectorXd RngStream::standard_normal_vector(Eigen::Index dim) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal();
  return v;
}

Eigen::VectorXd RngStream::unit_vector(Eigen::Index dim) {
  if (dim == 1) return Eigen::VectorXd::Constant(1, uniform() < 0.5 ? -1.0 : 1.0);
  for (;;) {
    Eigen::VectorXd v = standard_normal_vector(dim);
    const double n = v.norm();
    if (n > 0.0) return v / n;
  }
}

}  // namespace skipping
