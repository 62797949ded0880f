#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "skipping/core.hpp"

namespace skipping {

// --- radius laws for radially symmetric proposals -----------------------------

struct ExponentialRadius {
  double rate = 1.0;
};

struct GammaRadius {
  double shape = 1.0;
  double rate = 1.0;
};

/// Degenerate radius; only meaningful for hand-checkable tests.
struct ConstantRadius {
  double value = 1.0;
};

using RadiusLaw = std::variant<ExponentialRadius, GammaRadius, ConstantRadius>;

/// Symmetric proposal q with q(0) > 0.
///
/// Two families are supported. A radially symmetric proposal draws a uniform
/// direction and an independent radius, so the radial increment does not
/// depend on the direction. A Gaussian N(0, Sigma) proposal has, given
/// direction phi, a radial part with density proportional to
/// r^(d-1) exp(-(phi' Sigma^-1 phi) r^2 / 2).
class UnderlyingProposal {
 public:
  static UnderlyingProposal radial(Eigen::Index dim, RadiusLaw law);
  /// Throws InvalidArgument unless covariance is symmetric positive-definite.
  static UnderlyingProposal gaussian(const Eigen::MatrixXd& covariance);
  static UnderlyingProposal isotropic_gaussian(Eigen::Index dim, double scale);

  Eigen::Index dim() const { return dim_; }
  bool is_gaussian() const { return gaussian_.has_value(); }
  const RadiusLaw* radius_law() const { return radius_ ? &*radius_ : nullptr; }
  const Eigen::MatrixXd& covariance() const;

  /// Reuse the first radial increment for every skip.
  bool equal_increments() const { return equal_increments_; }
  UnderlyingProposal with_equal_increments(bool on) const;

  /// Exponential radial increments with this rate, if that is the radius law.
  std::optional<double> exponential_rate() const;

  Point sample_offset(RngStream& rng) const;
  /// Radial increment conditional on direction phi (|phi| = 1 within 1e-12).
  double sample_radial_increment(const Point& phi, RngStream& rng) const;

  /// phi' Sigma^-1 phi for the Gaussian family.
  double precision_quadratic(const Point& phi) const;

 private:
  struct Gaussian {
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd chol_lower;
    Eigen::LLT<Eigen::MatrixXd> llt;
  };

  UnderlyingProposal() = default;
  double sample_radius(RngStream& rng) const;

  Eigen::Index dim_ = 0;
  std::optional<RadiusLaw> radius_;
  std::optional<Gaussian> gaussian_;
  bool equal_increments_ = false;
};

void check_unit(const Point& phi);

// --- halting index ------------------------------------------------------------

struct DeterministicHalting {
  std::uint64_t k = 1;
};

struct GeometricHalting {
  double p = 0.5;
  std::uint64_t cap = 10000;
};

/// K = infinity. The skipping loop stops only on entry into the support;
/// exceeding safety_cap raises FiniteSkippingViolation.
struct InfiniteHalting {
  std::uint64_t safety_cap = 1000000;
};

using HaltingLaw = std::variant<DeterministicHalting, GeometricHalting, InfiniteHalting>;

/// A realised halting index.
struct HaltingDraw {
  std::uint64_t limit = 1;  ///< K, or the safety cap when infinite
  bool infinite = false;
};

/// Distribution of the halting index K, optionally dependent on the skipping
/// direction. Direction-dependent laws are evaluated on a canonical
/// representative of {phi, -phi} (first nonzero coordinate positive), so
/// K_phi = K_{-phi} holds by construction.
class HaltingIndex {
 public:
  using DirectionalLaw = std::function<HaltingLaw(const Point& canonical_phi)>;

  HaltingIndex(HaltingLaw law = DeterministicHalting{1});
  static HaltingIndex direction_dependent(DirectionalLaw law);

  bool is_direction_dependent() const { return static_cast<bool>(directional_); }
  const HaltingLaw& law() const { return law_; }

  /// Law in force for direction phi.
  HaltingLaw law_for(const Point* phi) const;
  HaltingDraw sample(const Point* phi, RngStream& rng) const;

 private:
  HaltingLaw law_;
  DirectionalLaw directional_;
};

void validate(const HaltingLaw& law);

/// Representative of {phi, -phi} whose first nonzero coordinate is positive.
Point canonical_direction(const Point& phi);

HaltingDraw sample_halting(const HaltingLaw& law, RngStream& rng);

// --- angular densities --------------------------------------------------------

/// Location-dependent density q_phi(x, phi) of the proposal direction, with
/// a matching sampler. Density is with respect to surface measure on the unit
/// sphere (counting measure on {-1, +1} in one dimension).
struct DirectionalDensity {
  std::function<double(const Point& x, const Point& phi)> density;
  std::function<Point(const Point& x, RngStream& rng)> sample;

  static DirectionalDensity uniform(Eigen::Index dim);
};

/// Surface area of the unit sphere in R^dim (2 for dim = 1).
double unit_sphere_area(Eigen::Index dim);

}  // namespace skipping
