#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "skipping/core.hpp"
#include "skipping/samplers.hpp"

namespace skipping {

/// -x1 sin(sqrt|x1 - x2 - 47|) - (x2 + 47) sin(sqrt|x1/2 + x2 + 47|).
double eggholder(const Point& x);

/// Box [-512, 512]^2 and the reported global minimiser.
Box eggholder_domain();
inline const Eigen::Vector2d kEggholderOptimum{512.0, 404.2319};
inline constexpr double kEggholderMinimum = -959.6407;

/// Finite mixture of Gaussians with cached Cholesky factors.
class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                  std::vector<Eigen::MatrixXd> covariances);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }

  /// log sum_i w_i N(x; mu_i, Sigma_i), evaluated with log-sum-exp.
  double logpdf(const Point& x) const;
  /// log N(x; mu_i, Sigma_i) for component i.
  double component_logpdf(std::size_t i, const Point& x) const;

 private:
  Eigen::Index dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  std::vector<double> log_norms_;  // -d/2 log 2pi - 1/2 log det Sigma_i
};

double mixture_logpdf(const GaussianMixture& g, const Point& x);

/// Means uniform in [-spread, spread]^d, covariances G G' + 0.1 I with
/// G_ij ~ N(0, 1/d), flat-Dirichlet weights.
GaussianMixture make_random_mixture(std::uint64_t seed, std::size_t m, Eigen::Index d,
                                    double spread);

/// A point of {log rho <= level_log} on the boundary of the set: walks from
/// the mean of the heaviest component along +e_1 until the level is crossed,
/// then bisects the crossing.
Point level_set_entry_point(const GaussianMixture& g, double level_log);

/// The base density conditioned on the closed sublevel set
/// {x : log rho(x) <= level_log}; off the set the log-density is -inf.
LogTarget level_conditioned_target(GaussianMixture base, double level_log);

/// exp(-f/T) on the closed box, -inf outside it.
LogTarget boltzmann_target(Objective f, double temperature, Box domain);

/// Uniform density on a finite union of closed intervals of the real line.
LogTarget interval_union_target(std::vector<std::pair<double, double>> intervals);

void to_json(nlohmann::json& j, const GaussianMixture& g);
GaussianMixture mixture_from_json(const nlohmann::json& j);

}  // namespace skipping
