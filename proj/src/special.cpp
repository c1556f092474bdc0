#include "qflat/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qflat {

namespace {

// x = k/2 with k a positive integer?
bool half_integer_index(double x, int& k) {
  const double twice = 2.0 * x;
  if (x <= 0.0 || twice > 340.0 || twice != std::floor(twice)) return false;
  k = static_cast<int>(twice);
  return true;
}

}  // namespace

double gamma_function(double x) {
  int k = 0;
  if (!half_integer_index(x, k)) return std::tgamma(x);
  // Walk up from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi) in steps of one.
  double value = (k % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
  for (double y = (k % 2 == 0) ? 1.0 : 0.5; y < x; y += 1.0) value *= y;
  return value;
}

double log_gamma(double x) {
  if (x <= 0.0) throw std::domain_error("log_gamma: x must be positive");
  int k = 0;
  if (half_integer_index(x, k) && k <= 200) return std::log(gamma_function(x));
  return std::lgamma(x);
}

Rational rising_factorial(const Rational& x, unsigned n) {
  Rational out = 1;
  for (unsigned j = 0; j < n; ++j) out *= x + j;
  out.canonicalize();
  return out;
}

}  // namespace qflat
