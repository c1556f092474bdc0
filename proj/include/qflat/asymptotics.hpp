#pragma once

#include "qflat/rational.hpp"

#include <span>

namespace qflat {

/// Two-term small-tau expansion of Q_P:
/// (tau^{r/2}/2) (Gamma(r/2) c_0 + Gamma(r/2+1)(-c_1 + kappa/6 + nu/2) tau).
double watson2(std::span<const double> P, double mu, double kappa, double nu, double tau);

struct FSeries {
  double f0 = 0.0;  // f_P(0) = c_0
  double f2 = 0.0;  // f_P''(0)/2 = -c_1 + kappa/6 + nu/2
};

FSeries fseries2(std::span<const double> P, double kappa, double nu);

/// Leading large-tau term of int_a^inf e^{-t^2/tau} t^mu e^{lambda t} dt:
/// lambda^mu sqrt(pi) / 2^mu tau^{mu+1/2} e^{lambda^2 tau/4}.
double tail_gauss_exp(double a, double lambda, double mu, double tau);
double log_tail_gauss_exp(double a, double lambda, double mu, double tau);

/// Leading large-tau term of Q_P, using the top coefficient c_n:
/// (-1)^n c_n sqrt(pi) (nu+kappa+2n)^mu / 2^{mu+nu+kappa+2n}
///   tau^{mu+1/2} e^{(kappa+nu+2n)^2 tau/4}.
/// Requires nu > 0 and kappa > 0 (std::invalid_argument otherwise).
double qp_large_tau(std::span<const double> P, double mu, double kappa, double nu,
                    double tau);

/// ln |qp_large_tau|, usable where the value itself overflows.
double log_qp_large_tau(std::span<const double> P, double mu, double kappa, double nu,
                        double tau);

/// What a central sequence forces on P_n:
/// Q_{P_n} = e^{alpha_n tau} Q_{P_0} with alpha_n = n(nu+kappa+n),
/// c_{n,1} = -2n(nu+kappa+n)/(mu+kappa+1),
/// c_{n,n} = (-1)^n 4^n ((nu+kappa)/(nu+kappa+2n))^mu.
struct CentralPrediction {
  int n = 0;
  Rational alpha_n;
  Rational c_n1;
  double c_nn = 0.0;  // signed
};

CentralPrediction central_predict(int n, const Rational& mu, const Rational& kappa,
                                  const Rational& nu);

}  // namespace qflat
