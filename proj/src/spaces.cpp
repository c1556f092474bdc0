#include "qflat/spaces.hpp"

#include "qflat/special.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qflat {

namespace {

// ln(sh x / x), even in x.
double log_sinhc(double x) {
  const double a = std::fabs(x);
  if (a < 1e-4) {
    const double x2 = a * a;
    return x2 / 6.0 - x2 * x2 / 180.0;
  }
  if (a < 20.0) return std::log(std::sinh(a) / a);
  return a - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * a)) - std::log(a);
}

double log_cosh(double x) {
  const double a = std::fabs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

std::string RootData::name() const {
  switch (family) {
    case Family::Sphere: return "S" + std::to_string(size);
    case Family::ComplexProjective: return "CP" + std::to_string(size);
    case Family::QuaternionicProjective: return "HP" + std::to_string(size);
    case Family::CayleyPlane: return "OP2";
  }
  return "?";
}

RootData make_space(Family family, int size, double B) {
  if (!(B > 0.0) || !std::isfinite(B)) throw std::invalid_argument("root scale B must be positive");
  RootData d;
  d.family = family;
  d.B = B;
  switch (family) {
    case Family::Sphere:
      if (size < 2) throw std::invalid_argument("sphere dimension must be at least 2");
      d.size = size;
      d.m = size;
      d.m_beta = size - 1;
      d.m_half = 0;
      break;
    case Family::ComplexProjective:
      if (size < 1) throw std::invalid_argument("CP^n requires n >= 1");
      d.size = size;
      d.m = 2 * size;
      d.m_beta = 1;
      d.m_half = 2 * size - 2;
      break;
    case Family::QuaternionicProjective:
      if (size < 1) throw std::invalid_argument("HP^n requires n >= 1");
      d.size = size;
      d.m = 4 * size;
      d.m_beta = 3;
      d.m_half = 4 * size - 4;
      break;
    case Family::CayleyPlane:
      d.size = 2;
      d.m = 16;
      d.m_beta = 7;
      d.m_half = 8;
      break;
    default:
      throw std::invalid_argument("unknown family");
  }
  return d;
}

RootData parse_space(std::string_view selector) {
  auto number = [&](std::string_view digits) {
    int value = 0;
    const auto* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, value);
    if (digits.empty() || ec != std::errc() || ptr != end)
      throw std::invalid_argument("unknown space selector '" + std::string(selector) + "'");
    return value;
  };
  if (selector == "OP2") return make_space(Family::CayleyPlane);
  if (selector.starts_with("CP")) return make_space(Family::ComplexProjective, number(selector.substr(2)));
  if (selector.starts_with("HP")) return make_space(Family::QuaternionicProjective, number(selector.substr(2)));
  if (selector.starts_with("S")) return make_space(Family::Sphere, number(selector.substr(1)));
  throw std::invalid_argument("unknown space selector '" + std::string(selector) + "'");
}

std::vector<RootData> default_catalog() {
  return {make_space(Family::Sphere, 2),
          make_space(Family::Sphere, 3),
          make_space(Family::Sphere, 4),
          make_space(Family::Sphere, 5),
          make_space(Family::Sphere, 7),
          make_space(Family::ComplexProjective, 2),
          make_space(Family::ComplexProjective, 3),
          make_space(Family::QuaternionicProjective, 2),
          make_space(Family::CayleyPlane)};
}

ChiParams chi_params(const RootData& space, int n) {
  if (n < 0) throw std::invalid_argument("isotype index must be nonnegative");
  ChiParams p;
  p.n = n;
  p.A = Rational(space.m_beta) + make_rational(space.m_half, 2);
  p.a = p.A + n;
  p.b = -n;
  p.c = make_rational(space.m, 2);
  p.mu = make_rational(space.m - 1, 2);
  p.kappa = p.mu;
  p.nu = make_rational(space.m_beta, 2);
  p.r = p.mu + p.kappa + 1;
  for (Rational* q : {&p.a, &p.b, &p.c, &p.A, &p.mu, &p.kappa, &p.nu, &p.r}) q->canonicalize();
  return p;
}

double eta_radial(const RootData& space, double rho) {
  const double x = rho * space.B;
  return std::ldexp(std::exp((space.m - 1) * log_sinhc(x) + space.m_beta * log_cosh(x)), space.m);
}

double sphere_volume(int m) {
  if (m < 1) throw std::invalid_argument("sphere_volume: m must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / gamma_function(0.5 * m);
}

double polar_weight(const RootData& space, double rho) {
  return std::pow(rho, space.m - 1) * std::sqrt(eta_radial(space, rho));
}

double reduced_weight(const RootData& space, double t) {
  const double h = 0.5 * (space.m - 1);
  return std::pow(2.0, 0.5 * space.m) / std::pow(space.B, space.m) * std::pow(t, h) *
         std::pow(std::sinh(t), h) * std::pow(std::cosh(t), 0.5 * space.m_beta);
}

}  // namespace qflat
