#include "skipping/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

namespace skipping {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Standard error of the mean of `values` from non-overlapping batches.
BatchMeansEstimate batch_means(std::span<const double> values) {
  const std::size_t n = values.size();
  BatchMeansEstimate out;
  out.mean = mean_of(values);
  const auto n_batches = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t batch = n / n_batches;
  std::vector<double> means;
  means.reserve(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b)
    means.push_back(mean_of(values.subspan(b * batch, batch)));
  const double grand = mean_of(means);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double var_of_batch_mean = ss / static_cast<double>(n_batches - 1);
  out.std_error = std::sqrt(var_of_batch_mean / static_cast<double>(n_batches));
  out.n_batches = n_batches;
  return out;
}

}  // namespace

BatchMeansEstimate ergodic_average(std::span<const double> values) {
  if (values.size() < 100) throw InvalidArgument("ergodic_average needs at least 100 values");
  return batch_means(values);
}

BatchMeansEstimate ergodic_average(const ChainResult& chain,
                                   const std::function<double(const Point&)>& f) {
  const auto v = observe(chain, f);
  return ergodic_average(v);
}

CovarianceEstimate lag1_autocovariance(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 1000) throw InvalidArgument("lag1_autocovariance needs at least 1000 values");
  const double ybar = mean_of(values);
  std::vector<double> products(n - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    products[i] = (values[i] - ybar) * (values[i + 1] - ybar);
    sum += products[i];
  }
  CovarianceEstimate out;
  out.estimate = sum / static_cast<double>(n - 1);
  out.std_error = batch_means(products).std_error;
  return out;
}

std::vector<double> discard_burn_in(std::span<const double> values, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw InvalidArgument("burn-in fraction must be in [0,1)");
  const auto skip = static_cast<std::size_t>(fraction * static_cast<double>(values.size()));
  return {values.begin() + static_cast<std::ptrdiff_t>(skip), values.end()};
}

std::vector<double> observe(const ChainResult& chain,
                            const std::function<double(const Point&)>& f) {
  std::vector<double> out;
  out.reserve(chain.trace.size());
  for (const auto& r : chain.trace) out.push_back(f(r.next_state()));
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges poorly; Q is 1 to double precision
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("KS test needs two non-empty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  const double d = ks_statistic(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

double transition_balance_test(std::span<const double> values, std::span<const double> bin_edges) {
  if (bin_edges.size() < 3) throw InvalidArgument("need at least two bins");
  if (!std::is_sorted(bin_edges.begin(), bin_edges.end()))
    throw InvalidArgument("bin edges must be increasing");
  auto bin_of = [&](double v) -> long {
    if (v < bin_edges.front() || v > bin_edges.back()) return -1;
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), v);
    long idx = static_cast<long>(it - bin_edges.begin()) - 1;
    const long last = static_cast<long>(bin_edges.size()) - 2;
    return std::min(idx, last);
  };

  std::map<std::pair<long, long>, std::uint64_t> flows;
  for (std::size_t t = 0; t + 1 < values.size(); ++t) {
    const long i = bin_of(values[t]);
    const long j = bin_of(values[t + 1]);
    if (i < 0 || j < 0 || i == j) continue;
    ++flows[{i, j}];
  }

  double chi2 = 0.0;
  int dof = 0;
  const long n_bins = static_cast<long>(bin_edges.size()) - 1;
  for (long i = 0; i < n_bins; ++i) {
    for (long j = i + 1; j < n_bins; ++j) {
      const auto fwd = flows.contains({i, j}) ? flows.at({i, j}) : 0;
      const auto bwd = flows.contains({j, i}) ? flows.at({j, i}) : 0;
      const double total = static_cast<double>(fwd + bwd);
      if (total / 2.0 < 5.0) continue;
      const double diff = static_cast<double>(fwd) - static_cast<double>(bwd);
      chi2 += diff * diff / total;
      ++dof;
    }
  }
  if (dof == 0)
    throw SparseBinsError("no bin pair has an expected transition count >= 5; use coarser bins");
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

}  // namespace skipping
