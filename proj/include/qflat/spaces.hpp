#pragma once

#include "qflat/rational.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace qflat {

enum class Family { Sphere, ComplexProjective, QuaternionicProjective, CayleyPlane };

/// A compact rank-1 symmetric space reduced to its restricted-root data.
///
/// The positive restricted roots are beta and beta/2 with multiplicities
/// m_beta and m_half (m_half = 0 exactly for spheres), and
/// m = m_beta + m_half + 1. B = beta(iH0) is the root scale.
struct RootData {
  Family family = Family::Sphere;
  int size = 0;  // m of S^m, n of CP^n / HP^n, 2 for the Cayley plane
  int m = 0;
  int m_beta = 0;
  int m_half = 0;
  double B = 1.0;

  /// Selector-style name: "S3", "CP2", "HP2", "OP2".
  std::string name() const;

  friend bool operator==(const RootData&, const RootData&) = default;
};

/// Per-isotype parameters for Helgason index n.
///
/// a, b, c are the Gauss hypergeometric parameters of the spherical function;
/// A = a - n; mu = kappa = (m-1)/2, nu = m_beta/2 are the exponents of the
/// radial integrand; r = mu + kappa + 1 = m.
struct ChiParams {
  int n = 0;
  Rational a, b, c;
  Rational A;
  Rational mu, kappa, nu, r;
};

/// Catalog constructor. Sphere needs size >= 2, CP^n and HP^n need size >= 1,
/// the Cayley plane ignores size. Throws std::invalid_argument otherwise.
RootData make_space(Family family, int size = 0, double B = 1.0);

/// Parses "S<m>", "CP<n>", "HP<n>" or "OP2". Throws std::invalid_argument.
RootData parse_space(std::string_view selector);

/// The default scan list: S2, S3, S4, S5, S7, CP2, CP3, HP2, OP2.
std::vector<RootData> default_catalog();

ChiParams chi_params(const RootData& space, int n);

/// eta(rho H0) = 2^m (sh(rho B)/(rho B))^{m-1} ch(rho B)^{m_beta}; even in rho,
/// equal to 2^m at rho = 0.
double eta_radial(const RootData& space, double rho);

/// Volume of the unit sphere S^{m-1} in R^m: 2 pi^{m/2} / Gamma(m/2).
double sphere_volume(int m);

/// rho^{m-1} sqrt(eta(rho H0)), the radial weight before the t = rho B change
/// of variable.
double polar_weight(const RootData& space, double rho);

/// (2^{m/2} / B^m) t^{(m-1)/2} sh(t)^{(m-1)/2} ch(t)^{m_beta/2}, the weight
/// after the change of variable. polar_weight(t/B)/B == reduced_weight(t).
double reduced_weight(const RootData& space, double t);

}  // namespace qflat
