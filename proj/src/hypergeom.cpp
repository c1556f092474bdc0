#include "qflat/hypergeom.hpp"

#include "qflat/special.hpp"

#include <cmath>
#include <stdexcept>

namespace qflat {

Rational RationalPoly::evaluate(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  acc.canonicalize();
  return acc;
}

std::vector<double> RationalPoly::to_doubles() const {
  std::vector<double> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back(c.get_d());
  return out;
}

namespace {

void require_valid_c(const Rational& c) {
  if (is_integer(c) && c <= 0)
    throw std::invalid_argument("hypergeometric parameter c must not be a nonpositive integer");
}

}  // namespace

RationalPoly hypergeom_poly(const Rational& A, int n, const Rational& c) {
  require_valid_c(c);
  if (n < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
  const Rational a = A + n;
  const Rational b = -n;
  RationalPoly p;
  p.coeffs.reserve(static_cast<std::size_t>(n) + 1);
  p.coeffs.emplace_back(1);
  for (int j = 0; j < n; ++j) {
    Rational next = p.coeffs.back() * (a + j) * (b + j) / ((j + 1) * (c + j));
    next.canonicalize();
    p.coeffs.push_back(next);
  }
  return p;
}

RationalPoly chi_poly(const RootData& space, int n) {
  const ChiParams params = chi_params(space, n);
  return hypergeom_poly(params.A, n, params.c);
}

ClosedCoeffs closed_coeffs(const Rational& A, int n, const Rational& c) {
  require_valid_c(c);
  if (n < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
  ClosedCoeffs out;
  const auto un = static_cast<unsigned>(n);
  if (n > 0) {
    Rational c1 = -(A + n) * n / c;
    c1.canonicalize();
    out.c_n1 = c1;
  }
  // Gamma(A+2n)/Gamma(A+n) and Gamma(c+n)/Gamma(c) as rising factorials.
  Rational cnn = rising_factorial(A + n, un) / rising_factorial(c, un);
  if (n % 2 == 1) cnn = -cnn;
  cnn.canonicalize();
  out.c_nn = cnn;
  return out;
}

double eval_fchi(const RootData& space, int n, double t) {
  const std::vector<double> coeffs = chi_poly(space, n).to_doubles();
  const double sh = std::sinh(t);
  const double x = -sh * sh;
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace qflat
