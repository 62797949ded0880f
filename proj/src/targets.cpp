#include "skipping/targets.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/constants/constants.hpp>
#include <nlohmann/json.hpp>

namespace skipping {

double eggholder(const Point& x) {
  check_dim(2, x);
  const double x1 = x[0];
  const double x2 = x[1];
  return -x1 * std::sin(std::sqrt(std::abs(x1 - x2 - 47.0))) -
         (x2 + 47.0) * std::sin(std::sqrt(std::abs(x1 / 2.0 + x2 + 47.0)));
}

Box eggholder_domain() { return Box::cube(2, -512.0, 512.0); }

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
  const std::size_t m = weights_.size();
  if (m == 0) throw InvalidArgument("mixture needs at least one component");
  if (means_.size() != m || covariances_.size() != m)
    throw InvalidArgument("mixture weights, means and covariances differ in length");
  dim_ = means_.front().size();
  if (dim_ < 1) throw InvalidArgument("mixture dimension must be >= 1");

  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw InvalidArgument("mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture weights must sum to 1");

  const double log_2pi = std::log(2.0 * boost::math::constants::pi<double>());
  for (std::size_t i = 0; i < m; ++i) {
    if (means_[i].size() != dim_ || covariances_[i].rows() != dim_ ||
        covariances_[i].cols() != dim_)
      throw InvalidArgument("mixture component " + std::to_string(i) + " has the wrong shape");
    Eigen::LLT<Eigen::MatrixXd> llt(covariances_[i]);
    if (llt.info() != Eigen::Success)
      throw InvalidArgument("mixture covariance " + std::to_string(i) + " is not SPD");
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    log_weights_.push_back(std::log(weights_[i]));
    log_norms_.push_back(-0.5 * static_cast<double>(dim_) * log_2pi - 0.5 * log_det);
    factors_.push_back(std::move(llt));
  }
}

double GaussianMixture::component_logpdf(std::size_t i, const Point& x) const {
  const Eigen::VectorXd white = factors_[i].matrixL().solve(x - means_[i]);
  return log_norms_[i] - 0.5 * white.squaredNorm();
}

double GaussianMixture::logpdf(const Point& x) const {
  check_dim(dim_, x);
  double terms[64];
  std::vector<double> heap;
  double* t = terms;
  if (size() > 64) {
    heap.resize(size());
    t = heap.data();
  }
  double peak = kNegInf;
  for (std::size_t i = 0; i < size(); ++i) {
    t[i] = log_weights_[i] + component_logpdf(i, x);
    peak = std::max(peak, t[i]);
  }
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += std::exp(t[i] - peak);
  return peak + std::log(acc);
}

double mixture_logpdf(const GaussianMixture& g, const Point& x) { return g.logpdf(x); }

GaussianMixture make_random_mixture(std::uint64_t seed, std::size_t m, Eigen::Index d,
                                    double spread) {
  if (m < 1 || d < 1) throw InvalidArgument("mixture needs m >= 1 and d >= 1");
  if (!(spread > 0.0)) throw InvalidArgument("mixture spread must be > 0");
  RngStream rng(seed);
  std::vector<double> weights(m);
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  const double g_scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::VectorXd mu(d);
    for (Eigen::Index j = 0; j < d; ++j) mu[j] = rng.uniform(-spread, spread);
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) g(r, c) = g_scale * rng.normal();
    Eigen::MatrixXd cov = g * g.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
    cov = 0.5 * (cov + cov.transpose());
    means.push_back(std::move(mu));
    covs.push_back(std::move(cov));
    weights[i] = rng.exponential(1.0);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return GaussianMixture(std::move(weights), std::move(means), std::move(covs));
}

Point level_set_entry_point(const GaussianMixture& g, double level_log) {
  const auto heaviest = static_cast<std::size_t>(
      std::max_element(g.weights().begin(), g.weights().end()) - g.weights().begin());
  const Point origin = g.means()[heaviest];
  if (g.logpdf(origin) <= level_log) return origin;
  Point dir = Point::Zero(g.dim());
  dir[0] = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (g.logpdf(origin + hi * dir) > level_log) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error("level set not reached along the search ray");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-9 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g.logpdf(origin + mid * dir) > level_log) lo = mid;
    else hi = mid;
  }
  return origin + hi * dir;
}

LogTarget level_conditioned_target(GaussianMixture base, double level_log) {
  const Eigen::Index d = base.dim();
  return LogTarget(d, [g = std::move(base), level_log](const Point& x) {
    const double lp = g.logpdf(x);
    return lp <= level_log ? lp : kNegInf;
  });
}

LogTarget boltzmann_target(Objective f, double temperature, Box domain) {
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be > 0");
  const Eigen::Index d = domain.dim();
  return LogTarget(d, [f = std::move(f), temperature, domain = std::move(domain)](const Point& x) {
    if (!domain.contains(x)) return kNegInf;
    const double v = f(x);
    if (v == kPosInf) return kNegInf;
    return -v / temperature;
  });
}

LogTarget interval_union_target(std::vector<std::pair<double, double>> intervals) {
  if (intervals.empty()) throw InvalidArgument("interval union must be non-empty");
  double length = 0.0;
  for (const auto& [lo, hi] : intervals) {
    if (!(lo < hi)) throw InvalidArgument("interval must satisfy lo < hi");
    length += hi - lo;
  }
  const double log_height = -std::log(length);
  return LogTarget(1, [intervals = std::move(intervals), log_height](const Point& x) {
    for (const auto& [lo, hi] : intervals)
      if (x[0] >= lo && x[0] <= hi) return log_height;
    return kNegInf;
  });
}

void to_json(nlohmann::json& j, const GaussianMixture& g) {
  j = nlohmann::json::object();
  j["dim"] = g.dim();
  j["weights"] = g.weights();
  auto means = nlohmann::json::array();
  for (const auto& mu : g.means()) means.push_back(std::vector<double>(mu.data(), mu.data() + mu.size()));
  j["means"] = std::move(means);
  auto covs = nlohmann::json::array();
  for (const auto& c : g.covariances()) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(c.cols()));
      for (Eigen::Index k = 0; k < c.cols(); ++k) row[static_cast<std::size_t>(k)] = c(r, k);
      rows.push_back(std::move(row));
    }
    covs.push_back(std::move(rows));
  }
  j["covariances"] = std::move(covs);
}

GaussianMixture mixture_from_json(const nlohmann::json& j) {
  const auto weights = j.at("weights").get<std::vector<double>>();
  std::vector<Eigen::VectorXd> means;
  for (const auto& m : j.at("means")) {
    const auto v = m.get<std::vector<double>>();
    means.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  std::vector<Eigen::MatrixXd> covs;
  for (const auto& c : j.at("covariances")) {
    const auto rows = c.get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd mat(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n)
        throw InvalidArgument("covariance matrix in JSON is not square");
      for (Eigen::Index k = 0; k < n; ++k)
        mat(r, k) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
    }
    covs.push_back(std::move(mat));
  }
  return GaussianMixture(weights, std::move(means), std::move(covs));
}

}  // namespace skipping
