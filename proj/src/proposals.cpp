#include "skipping/proposals.hpp"

#include <cmath>

#include <boost/math/constants/constants.hpp>

namespace skipping {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const RadiusLaw& law) {
  std::visit(overloaded{
                 [](const ExponentialRadius& r) {
                   if (!(r.rate > 0.0)) throw InvalidArgument("exponential radius rate must be > 0");
                 },
                 [](const GammaRadius& r) {
                   if (!(r.shape > 0.0) || !(r.rate > 0.0))
                     throw InvalidArgument("gamma radius shape and rate must be > 0");
                 },
                 [](const ConstantRadius& r) {
                   if (!(r.value > 0.0)) throw InvalidArgument("constant radius must be > 0");
                 },
             },
             law);
}

}  // namespace

UnderlyingProposal UnderlyingProposal::radial(Eigen::Index dim, RadiusLaw law) {
  if (dim < 1) throw InvalidArgument("proposal dimension must be >= 1");
  validate(law);
  UnderlyingProposal p;
  p.dim_ = dim;
  p.radius_ = law;
  return p;
}

UnderlyingProposal UnderlyingProposal::gaussian(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() < 1 || covariance.rows() != covariance.cols())
    throw InvalidArgument("covariance must be a non-empty square matrix");
  if (!covariance.allFinite()) throw InvalidArgument("covariance has non-finite entries");
  const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, covariance.cwiseAbs().maxCoeff()))
    throw InvalidArgument("covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw InvalidArgument("covariance is not positive-definite");
  UnderlyingProposal p;
  p.dim_ = covariance.rows();
  p.gaussian_ = Gaussian{covariance, llt.matrixL(), llt};
  return p;
}

UnderlyingProposal UnderlyingProposal::isotropic_gaussian(Eigen::Index dim, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("proposal scale must be > 0");
  return gaussian(Eigen::MatrixXd::Identity(dim, dim) * (scale * scale));
}

const Eigen::MatrixXd& UnderlyingProposal::covariance() const {
  if (!gaussian_) throw InvalidArgument("proposal is not Gaussian");
  return gaussian_->covariance;
}

UnderlyingProposal UnderlyingProposal::with_equal_increments(bool on) const {
  UnderlyingProposal p = *this;
  p.equal_increments_ = on;
  return p;
}

std::optional<double> UnderlyingProposal::exponential_rate() const {
  if (!radius_) return std::nullopt;
  if (const auto* e = std::get_if<ExponentialRadius>(&*radius_)) return e->rate;
  return std::nullopt;
}

double UnderlyingProposal::sample_radius(RngStream& rng) const {
  return std::visit(overloaded{
                        [&](const ExponentialRadius& r) { return rng.exponential(r.rate); },
                        [&](const GammaRadius& r) { return rng.gamma(r.shape, r.rate); },
                        [](const ConstantRadius& r) { return r.value; },
                    },
                    *radius_);
}

Point UnderlyingProposal::sample_offset(RngStream& rng) const {
  if (gaussian_) return gaussian_->chol_lower * rng.standard_normal_vector(dim_);
  Point dir = rng.unit_vector(dim_);
  return dir * sample_radius(rng);
}

void check_unit(const Point& phi) {
  if (std::abs(phi.norm() - 1.0) > 1e-12) throw InvalidArgument("direction is not a unit vector");
}

double UnderlyingProposal::precision_quadratic(const Point& phi) const {
  if (!gaussian_) throw InvalidArgument("proposal is not Gaussian");
  return phi.dot(gaussian_->llt.solve(phi));
}

double UnderlyingProposal::sample_radial_increment(const Point& phi, RngStream& rng) const {
  check_dim(dim_, phi);
  check_unit(phi);
  if (gaussian_) {
    const double w = rng.chi_square(static_cast<double>(dim_));
    return std::sqrt(w / precision_quadratic(phi));
  }
  return sample_radius(rng);
}

// --- halting ------------------------------------------------------------------

void validate(const HaltingLaw& law) {
  std::visit(overloaded{
                 [](const DeterministicHalting& h) {
                   if (h.k < 1) throw InvalidArgument("deterministic halting index must be >= 1");
                 },
                 [](const GeometricHalting& h) {
                   if (!(h.p > 0.0 && h.p <= 1.0))
                     throw InvalidArgument("geometric halting p must lie in (0, 1]");
                   if (h.cap < 1) throw InvalidArgument("geometric halting cap must be >= 1");
                 },
                 [](const InfiniteHalting& h) {
                   if (h.safety_cap < 1) throw InvalidArgument("safety cap must be >= 1");
                 },
             },
             law);
}

HaltingIndex::HaltingIndex(HaltingLaw law) : law_(law) { validate(law_); }

HaltingIndex HaltingIndex::direction_dependent(DirectionalLaw law) {
  if (!law) throw InvalidArgument("direction-dependent halting requires a law");
  HaltingIndex h;
  h.directional_ = std::move(law);
  return h;
}

Point canonical_direction(const Point& phi) {
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    if (phi[i] > 0.0) return phi;
    if (phi[i] < 0.0) return -phi;
  }
  return phi;
}

HaltingLaw HaltingIndex::law_for(const Point* phi) const {
  if (!directional_) return law_;
  if (phi == nullptr) throw InvalidArgument("direction-dependent halting needs a direction");
  HaltingLaw law = directional_(canonical_direction(*phi));
  validate(law);
  return law;
}

HaltingDraw sample_halting(const HaltingLaw& law, RngStream& rng) {
  return std::visit(overloaded{
                        [](const DeterministicHalting& h) { return HaltingDraw{h.k, false}; },
                        [&](const GeometricHalting& h) {
                          if (h.p >= 1.0) return HaltingDraw{1, false};
                          // G = 1 + floor(log U / log(1 - p)) is geometric on {1, 2, ...}
                          const double g =
                              1.0 + std::floor(std::log(rng.uniform()) / std::log1p(-h.p));
                          const double capped = std::min(g, static_cast<double>(h.cap));
                          return HaltingDraw{static_cast<std::uint64_t>(capped), false};
                        },
                        [](const InfiniteHalting& h) { return HaltingDraw{h.safety_cap, true}; },
                    },
                    law);
}

HaltingDraw HaltingIndex::sample(const Point* phi, RngStream& rng) const {
  return sample_halting(law_for(phi), rng);
}

// --- angular ------------------------------------------------------------------

double unit_sphere_area(Eigen::Index dim) {
  if (dim == 1) return 2.0;
  const double half = 0.5 * static_cast<double>(dim);
  return 2.0 * std::pow(boost::math::constants::pi<double>(), half) / std::tgamma(half);
}

DirectionalDensity DirectionalDensity::uniform(Eigen::Index dim) {
  const double value = 1.0 / unit_sphere_area(dim);
  return DirectionalDensity{
      [value](const Point&, const Point&) { return value; },
      [dim](const Point&, RngStream& rng) { return rng.unit_vector(dim); },
  };
}

}  // namespace skipping
