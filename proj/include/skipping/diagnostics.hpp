#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "skipping/core.hpp"
#include "skipping/samplers.hpp"

namespace skipping {

struct BatchMeansEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_batches = 0;
};

struct CovarianceEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Sample mean with a batch-means standard error over floor(sqrt(n)) batches.
/// Requires at least 100 values.
BatchMeansEstimate ergodic_average(std::span<const double> values);
BatchMeansEstimate ergodic_average(const ChainResult& chain,
                                   const std::function<double(const Point&)>& f);

/// (1/(n-1)) sum (y_i - ybar)(y_{i+1} - ybar), with a batch-means error on
/// the lagged products. Requires at least 1000 values.
CovarianceEstimate lag1_autocovariance(std::span<const double> values);

/// Drops the leading fraction of a series (default 10%).
std::vector<double> discard_burn_in(std::span<const double> values, double fraction = 0.1);

/// f applied to the post-step states of a chain.
std::vector<double> observe(const ChainResult& chain, const std::function<double(const Point&)>& f);

/// Asymptotic two-sample Kolmogorov-Smirnov p-value.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

class SparseBinsError : public Error {
 public:
  using Error::Error;
};

/// Chi-square test that the flow N(i->j) between bins equals N(j->i).
/// Pairs whose expected count (N(i->j) + N(j->i)) / 2 is below 5 are skipped;
/// if none remain SparseBinsError is thrown. Values outside the edges are
/// ignored, as are transitions within a bin.
double transition_balance_test(std::span<const double> values, std::span<const double> bin_edges);

}  // namespace skipping
