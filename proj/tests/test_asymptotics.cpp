#include "qflat/asymptotics.hpp"
#include "qflat/hypergeom.hpp"
#include "qflat/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qflat;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);
const std::vector<double> kOne = {1.0};

struct Exponents {
  double mu, kappa, nu;
};

Exponents exponents(const RootData& s) {
  const double h = 0.5 * (s.m - 1);
  return {h, h, 0.5 * s.m_beta};
}

double watson_error(const RootData& s, int n, double tau) {
  const auto P = chi_poly(s, n).to_doubles();
  const Exponents e = exponents(s);
  const double q = q_chi(s, n, tau).value;
  return std::fabs(q - watson2(P, e.mu, e.kappa, e.nu, tau)) / q;
}

double large_deviation(const RootData& s, int n, double tau) {
  const auto P = chi_poly(s, n).to_doubles();
  const Exponents e = exponents(s);
  return std::exp(q_chi(s, n, tau).log_value - log_qp_large_tau(P, e.mu, e.kappa, e.nu, tau)) - 1.0;
}

// f_P(t) = P(-sh^2 t) (sh t / t)^kappa ch(t)^nu
double f_p(const std::vector<double>& P, double kappa, double nu, double t) {
  const double sh = std::sinh(t);
  double p = 0.0;
  for (auto it = P.rbegin(); it != P.rend(); ++it) p = p * (-sh * sh) + *it;
  return p * std::pow(sh / t, kappa) * std::pow(std::cosh(t), nu);
}

}  // namespace

TEST(FSeries, Examples) {
  const FSeries a = fseries2(kOne, 0.0, 0.0);
  EXPECT_EQ(a.f0, 1.0);
  EXPECT_EQ(a.f2, 0.0);
  const FSeries b = fseries2(std::vector<double>{1.0, -2.0}, 1.0, 1.0);
  EXPECT_EQ(b.f0, 1.0);
  EXPECT_NEAR(b.f2, 8.0 / 3.0, 1e-15);
  const FSeries c = fseries2(kOne, 6.0, 0.0);
  EXPECT_NEAR(c.f2, 1.0, 1e-15);
}

TEST(FSeries, MatchesNumericSecondDerivative) {
  const double h = 1e-4;
  for (const auto& s : default_catalog()) {
    const Exponents e = exponents(s);
    for (int n = 0; n <= 3; ++n) {
      const auto P = chi_poly(s, n).to_doubles();
      const double f0 = P[0];
      const double second = (2.0 * f_p(P, e.kappa, e.nu, h) - 2.0 * f0) / (h * h);
      EXPECT_NEAR(fseries2(P, e.kappa, e.nu).f2, 0.5 * second, 1e-6) << s.name() << " n=" << n;
    }
  }
}

TEST(Watson2, Examples) {
  EXPECT_NEAR(watson2(kOne, 1, 1, 1, 0.01), 4.47545e-4, 1e-9);
  const double exact = kSqrtPi / 4.0 * std::pow(0.01, 1.5) * std::exp(0.01);
  EXPECT_NEAR(watson2(kOne, 1, 1, 1, 0.01) / exact, 1.0, 1e-4);
  for (double tau : {0.3, 1.0, 7.0})
    EXPECT_NEAR(watson2(kOne, 0, 0, 0, tau), std::sqrt(std::numbers::pi * tau) / 2.0, 1e-15);
  const FSeries f = fseries2(std::vector<double>{1.0, -2.0}, 1.0, 1.0);
  EXPECT_NEAR(f.f2, 2.0 + 2.0 / 3.0, 1e-15);
  EXPECT_THROW(watson2(kOne, -1, -0.5, 0, 0.1), std::invalid_argument);
}

TEST(Watson2, FirstOrderCoefficientByConstruction) {
  const std::vector<double> P = {1.0, -3.5, 1.25};
  const double mu = 1.5, kappa = 1.5, nu = 0.5, tau = 0.02;
  const double r = mu + kappa + 1.0;
  const double expected = 0.5 * std::pow(tau, r / 2) *
                          (std::tgamma(r / 2) + std::tgamma(r / 2 + 1) * fseries2(P, kappa, nu).f2 * tau);
  EXPECT_NEAR(watson2(P, mu, kappa, nu, tau) / expected, 1.0, 1e-13);
}

TEST(TailGaussExp, Examples) {
  for (double tau : {1.0, 10.0}) {
    EXPECT_NEAR(tail_gauss_exp(0, 2, 0, tau) / (kSqrtPi * std::sqrt(tau) * std::exp(tau)), 1.0, 1e-14);
    EXPECT_NEAR(tail_gauss_exp(0, 2, 1, tau) / (kSqrtPi * std::pow(tau, 1.5) * std::exp(tau)), 1.0, 1e-14);
    EXPECT_EQ(tail_gauss_exp(5, 2, 1, tau), tail_gauss_exp(0, 2, 1, tau));
  }
  EXPECT_THROW(tail_gauss_exp(0, 0, 0, 1), std::invalid_argument);
  EXPECT_THROW(tail_gauss_exp(0, 1, -1, 1), std::invalid_argument);
}

TEST(QpLargeTau, Examples) {
  for (double tau : {0.5, 3.0}) {
    EXPECT_NEAR(qp_large_tau(kOne, 1, 1, 1, tau) / (kSqrtPi / 4.0 * std::pow(tau, 1.5) * std::exp(tau)),
                1.0, 1e-14);
    EXPECT_NEAR(qp_large_tau(std::vector<double>{1.0, -2.0}, 1, 1, 1, tau) /
                    (kSqrtPi / 4.0 * std::pow(tau, 1.5) * std::exp(4.0 * tau)),
                1.0, 1e-14);
    EXPECT_NEAR(qp_large_tau(std::vector<double>{0.0, 0.0, 1.0}, 1, 1, 1, tau) /
                    (kSqrtPi * 6.0 / 128.0 * std::pow(tau, 1.5) * std::exp(9.0 * tau)),
                1.0, 1e-14);
  }
  EXPECT_THROW(qp_large_tau(kOne, 1, 1, 0, 1.0), std::invalid_argument);
  EXPECT_THROW(qp_large_tau(kOne, 1, 0, 1, 1.0), std::invalid_argument);
  EXPECT_THROW(log_qp_large_tau(kOne, 1, 1, -1, 1.0), std::invalid_argument);
}

TEST(CentralPredict, Examples) {
  const CentralPrediction p1 = central_predict(1, 1, 1, 1);
  EXPECT_EQ(p1.alpha_n, 3);
  EXPECT_EQ(p1.c_n1, -2);
  EXPECT_NEAR(p1.c_nn, -2.0, 1e-15);
  const CentralPrediction p0 = central_predict(0, make_rational(3, 2), make_rational(3, 2), 1);
  EXPECT_EQ(p0.alpha_n, 0);
  EXPECT_EQ(p0.c_n1, 0);
  EXPECT_EQ(p0.c_nn, 1.0);
  const CentralPrediction p2 = central_predict(2, 1, 1, 1);
  EXPECT_EQ(p2.alpha_n, 8);
  EXPECT_NEAR(p2.c_nn, 16.0 / 3.0, 1e-14);
  EXPECT_THROW(central_predict(-1, 1, 1, 1), std::invalid_argument);
}

TEST(CentralPredict, SphereThreeMatchesHypergeom) {
  const RootData s3 = parse_space("S3");
  for (int n = 1; n <= 10; ++n) {
    const ChiParams p = chi_params(s3, n);
    const CentralPrediction c = central_predict(n, p.mu, p.kappa, p.nu);
    const ClosedCoeffs closed = closed_coeffs(p.A, n, p.c);
    EXPECT_EQ(c.c_n1, *closed.c_n1) << n;
    EXPECT_NEAR(c.c_nn / to_double(closed.c_nn), 1.0, 1e-13) << n;
  }
}

TEST(CentralPredict, RateMatchesLinearCoefficient) {
  for (const auto& s : default_catalog()) {
    for (int n = 0; n <= 10; ++n) {
      const ChiParams p = chi_params(s, n);
      const CentralPrediction c = central_predict(n, p.mu, p.kappa, p.nu);
      const Rational expected = -(p.r / 2) * c.c_n1;
      EXPECT_EQ(c.alpha_n, expected) << s.name() << " n=" << n;
    }
  }
}

TEST(SmallTau, ErrorWithinTenTau) {
  for (const auto& s : default_catalog())
    for (int n = 0; n <= 3; ++n)
      for (double tau : {1e-3, 1e-2})
        EXPECT_LE(watson_error(s, n, tau), 10.0 * tau) << s.name() << " n=" << n << " tau=" << tau;
}

TEST(SmallTau, SecondOrderRemainder) {
  for (const auto& s : default_catalog()) {
    for (int n = 0; n <= 3; ++n) {
      for (double tau : {1e-2, 2e-3}) {
        const double ratio = watson_error(s, n, tau) / watson_error(s, n, tau / 2);
        EXPECT_GE(ratio, 3.0) << s.name() << " n=" << n << " tau=" << tau;
        EXPECT_LE(ratio, 5.0) << s.name() << " n=" << n << " tau=" << tau;
      }
    }
  }
}

TEST(SmallTau, OracleErrors) {
  // mpmath relative errors of the two-term expansion at tau = 1e-2.
  EXPECT_NEAR(watson_error(parse_space("S2"), 0, 1e-2), 2.231e-06, 2e-9);
  EXPECT_NEAR(watson_error(parse_space("CP2"), 2, 1e-2), 3.810e-03, 2e-6);
  EXPECT_NEAR(watson_error(parse_space("OP2"), 3, 1e-2), 1.431e-01, 2e-4);
}

TEST(LargeTau, RatioNearOneAndShrinking) {
  for (const auto& s : default_catalog()) {
    for (int n = 0; n <= 3; ++n) {
      const double d25 = large_deviation(s, n, 25.0);
      const double d100 = large_deviation(s, n, 100.0);
      const double d400 = large_deviation(s, n, 400.0);
      EXPECT_GE(1.0 + d100, 0.8);
      EXPECT_LE(1.0 + d100, 1.2);
      if (s.name() == "S3") {
        // The leading term is exact for S3.
        EXPECT_NEAR(d25, 0.0, 1e-10);
        EXPECT_NEAR(d100, 0.0, 1e-10);
        EXPECT_NEAR(d400, 0.0, 1e-10);
        continue;
      }
      EXPECT_LT(std::fabs(d100), std::fabs(d25)) << s.name() << " n=" << n;
      EXPECT_LT(std::fabs(d400), std::fabs(d100)) << s.name() << " n=" << n;
    }
  }
}

TEST(LargeTau, OracleDeviations) {
  EXPECT_NEAR(large_deviation(parse_space("S2"), 0, 100.0), -2.550e-03, 1e-6);
  EXPECT_NEAR(large_deviation(parse_space("HP2"), 1, 400.0), 4.464e-04, 1e-6);
  EXPECT_NEAR(large_deviation(parse_space("OP2"), 3, 100.0), 1.688e-03, 1e-6);
}
