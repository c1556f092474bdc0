#include "qflat/kernels.hpp"

#include "log_terms.hpp"

#include <cmath>

namespace qflat::kernels::scalar {

void log_integrand(const LogIntegrand& f, std::span<const double> t,
                   std::span<double> log_abs, std::span<double> sign) {
  const std::size_t degree = f.coeffs.size() - 1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ti = t[i];
    const double lt = std::log(ti);
    const double lsc = detail::log_sinhc(ti);
    const double lch = detail::log_cosh(ti);
    const double ln_x = 2.0 * (lsc + lt);  // ln sh^2 t

    double p = 0.0;
    double p_scale = 0.0;
    if (ln_x <= 0.0) {
      const double sh = ti < 20.0 ? std::sinh(ti) : std::exp(0.5 * ln_x);
      p = detail::comp_horner(f.coeffs, sh * sh, false);
    } else {
      // sum_j b_j x^j = x^n sum_j b_j (1/x)^{n-j}, evaluated in 1/x.
      p = detail::comp_horner(f.coeffs, std::exp(-ln_x), true);
      p_scale = static_cast<double>(degree) * ln_x;
    }
    sign[i] = p > 0.0 ? 1.0 : (p < 0.0 ? -1.0 : 0.0);

    double value = -ti * ti * f.inv_tau + std::log(std::fabs(p)) + p_scale;
    if (f.t_power != 0.0) value += f.t_power * lt;
    if (f.kappa != 0.0) value += f.kappa * lsc;
    if (f.nu != 0.0) value += f.nu * lch;
    log_abs[i] = value;
  }
}

Moments moments(std::span<const double> weights, std::span<const double> log_abs,
                std::span<const double> sign, std::span<const double> u, double shift) {
  Moments m;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double e = weights[i] * sign[i] * std::exp(log_abs[i] - shift);
    m.m0 += e;
    m.m1 += e * u[i];
    m.m2 += e * u[i] * u[i];
  }
  return m;
}

double centered(std::span<const double> weights, std::span<const double> log_abs,
                std::span<const double> sign, std::span<const double> u, double shift,
                double mean) {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double d = u[i] - mean;
    sum += weights[i] * sign[i] * std::exp(log_abs[i] - shift) * d * d;
  }
  return sum;
}

}  // namespace qflat::kernels::scalar
