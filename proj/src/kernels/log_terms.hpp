#pragma once

// Scalar building blocks shared by the reference kernel and by the tails of
// the vector kernels.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace qflat::kernels::detail {

// ln(sh t / t) for t >= 0.
inline double log_sinhc(double t) {
  if (t < 1e-4) {
    const double t2 = t * t;
    return t2 / 6.0 - t2 * t2 / 180.0;
  }
  if (t < 20.0) return std::log(std::sinh(t) / t);
  return t - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * t)) - std::log(t);
}

// ln ch t for t >= 0.
inline double log_cosh(double t) {
  return t + std::log1p(std::exp(-2.0 * t)) - std::numbers::ln2;
}

// Compensated Horner (Graillat, Langlois, Louvet) of sum_j a[j] z^j. With
// reversed = true it evaluates sum_j a[j] z^{n-j} instead.
inline double comp_horner(std::span<const double> a, double z, bool reversed) {
  const std::size_t n = a.size() - 1;
  auto coef = [&](std::size_t power) { return reversed ? a[n - power] : a[power]; };
  double s = coef(n);
  double c = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double p = s * z;
    const double pi = std::fma(s, z, -p);
    const double ak = coef(k);
    const double sk = p + ak;
    const double zz = sk - p;
    const double sigma = (p - (sk - zz)) + (ak - zz);
    s = sk;
    c = std::fma(c, z, pi + sigma);
  }
  return s + c;
}

}  // namespace qflat::kernels::detail
