#include "qflat/asymptotics.hpp"

#include "qflat/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qflat {

namespace {

int top_degree(std::span<const double> P) {
  int n = static_cast<int>(P.size()) - 1;
  while (n > 0 && P[static_cast<std::size_t>(n)] == 0.0) --n;
  return n;
}

}  // namespace

FSeries fseries2(std::span<const double> P, double kappa, double nu) {
  const double c0 = P.empty() ? 0.0 : P[0];
  const double c1 = P.size() > 1 ? P[1] : 0.0;
  return {c0, -c1 + kappa / 6.0 + nu / 2.0};
}

double watson2(std::span<const double> P, double mu, double kappa, double nu, double tau) {
  const double r = mu + kappa + 1.0;
  if (!(r > 0.0)) throw std::invalid_argument("watson2: mu + kappa + 1 must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("watson2: tau must be positive");
  const FSeries f = fseries2(P, kappa, nu);
  const double half = 0.5 * r;
  return 0.5 * std::pow(tau, half) *
         (gamma_function(half) * f.f0 + gamma_function(half + 1.0) * f.f2 * tau);
}

double log_tail_gauss_exp(double /*a*/, double lambda, double mu, double tau) {
  if (!(lambda > 0.0)) throw std::invalid_argument("tail_gauss_exp: lambda must be positive");
  if (!(mu > -1.0)) throw std::invalid_argument("tail_gauss_exp: mu must exceed -1");
  if (!(tau > 0.0)) throw std::invalid_argument("tail_gauss_exp: tau must be positive");
  return mu * std::log(lambda) + 0.5 * std::log(std::numbers::pi) - mu * std::numbers::ln2 +
         (mu + 0.5) * std::log(tau) + 0.25 * lambda * lambda * tau;
}

double tail_gauss_exp(double a, double lambda, double mu, double tau) {
  return std::exp(log_tail_gauss_exp(a, lambda, mu, tau));
}

double log_qp_large_tau(std::span<const double> P, double mu, double kappa, double nu,
                        double tau) {
  if (!(nu > 0.0) || !(kappa > 0.0))
    throw std::invalid_argument("qp_large_tau: requires nu > 0 and kappa > 0");
  if (!(mu + kappa > -1.0)) throw std::invalid_argument("qp_large_tau: mu + kappa must exceed -1");
  if (P.empty()) throw std::invalid_argument("qp_large_tau: empty polynomial");
  const int n = top_degree(P);
  const double cn = std::fabs(P[static_cast<std::size_t>(n)]);
  const double lambda = kappa + nu + 2.0 * n;
  return std::log(cn) - (nu + kappa + 2.0 * n) * std::numbers::ln2 +
         log_tail_gauss_exp(0.0, lambda, mu, tau);
}

double qp_large_tau(std::span<const double> P, double mu, double kappa, double nu, double tau) {
  const int n = top_degree(P);
  const double top = P.empty() ? 0.0 : P[static_cast<std::size_t>(n)];
  const double sign = ((n % 2 == 0) ? 1.0 : -1.0) * (top < 0.0 ? -1.0 : 1.0);
  return sign * std::exp(log_qp_large_tau(P, mu, kappa, nu, tau));
}

CentralPrediction central_predict(int n, const Rational& mu, const Rational& kappa,
                                  const Rational& nu) {
  if (n < 0) throw std::invalid_argument("central_predict: n must be nonnegative");
  CentralPrediction out;
  out.n = n;
  const Rational nk = nu + kappa;
  out.alpha_n = Rational(n) * (nk + n);
  out.c_n1 = Rational(-2 * n) * (nk + n) / (mu + kappa + 1);
  out.c_n1.canonicalize();
  out.alpha_n.canonicalize();
  if (n == 0) {
    out.c_nn = 1.0;
  } else {
    const double ratio = to_double(nk) / to_double(nk + 2 * n);
    out.c_nn = ((n % 2 == 0) ? 1.0 : -1.0) * std::pow(4.0, n) * std::pow(ratio, to_double(mu));
  }
  return out;
}

}  // namespace qflat
