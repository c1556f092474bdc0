#pragma once

#include "qflat/rational.hpp"
#include "qflat/spaces.hpp"

#include <optional>
#include <vector>

namespace qflat {

/// Polynomial with exact rational coefficients, coeffs[j] multiplies x^j.
struct RationalPoly {
  std::vector<Rational> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  Rational evaluate(const Rational& x) const;
  std::vector<double> to_doubles() const;
};

/// P_n(x) = F(A+n, -n; c; x), built from the exact term recurrence
/// c_{j+1} = c_j (a+j)(b+j) / ((j+1)(c+j)). Throws std::invalid_argument when c
/// is a nonpositive integer or n < 0.
RationalPoly hypergeom_poly(const Rational& A, int n, const Rational& c);

/// The hypergeometric polynomial of isotype n on the given space.
RationalPoly chi_poly(const RootData& space, int n);

struct ClosedCoeffs {
  std::optional<Rational> c_n1;  // absent for n = 0
  Rational c_nn;
};

/// Linear and leading coefficients of P_n from their product formulas:
/// c_{n,1} = -(A+n) n / c and
/// c_{n,n} = (-1)^n Gamma(A+2n)/Gamma(A+n) * Gamma(c)/Gamma(c+n).
ClosedCoeffs closed_coeffs(const Rational& A, int n, const Rational& c);

/// Spherical function along the radial ray: P_n(-sh^2 t) by Horner's scheme.
double eval_fchi(const RootData& space, int n, double t);

}  // namespace qflat
