#pragma once

#include "qflat/rational.hpp"

namespace qflat {

/// Gamma at a positive integer or half-integer x = k/2, via Gamma(1/2) = sqrt(pi)
/// and Gamma(x+1) = x Gamma(x). Falls back to std::tgamma for any other x.
double gamma_function(double x);

/// Natural log of gamma_function for x > 0.
double log_gamma(double x);

/// Gamma(x + n) / Gamma(x) = x (x+1) ... (x+n-1), exact.
Rational rising_factorial(const Rational& x, unsigned n);

}  // namespace qflat
