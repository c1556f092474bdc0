#include "qflat/hypergeom.hpp"
#include "qflat/kernels.hpp"
#include "qflat/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace qflat;

namespace {

struct Case {
  std::vector<double> signed_coeffs;
  kernels::LogIntegrand f;
};

Case make_case(const RootData& space, int n, double tau, double t_power) {
  Case c;
  for (const double v : chi_poly(space, n).to_doubles()) c.signed_coeffs.push_back(v);
  for (std::size_t j = 1; j < c.signed_coeffs.size(); j += 2) c.signed_coeffs[j] = -c.signed_coeffs[j];
  const double h = 0.5 * (space.m - 1);
  c.f = {1.0 / tau, t_power, h, 0.5 * space.m_beta, {}};
  return c;
}

std::vector<double> sample_points(std::mt19937_64& rng, std::size_t count, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> t(count);
  for (auto& v : t) v = u(rng);
  t[0] = 0.0;
  t[1] = 1e-9;
  t[2] = 0.4999999;
  t[3] = 0.5;
  return t;
}

bool avx2_ready() { return kernels::available(kernels::Isa::Avx2); }

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_TRUE(kernels::available(kernels::Isa::Scalar));
  EXPECT_EQ(kernels::table(kernels::Isa::Scalar).isa, kernels::Isa::Scalar);
  EXPECT_EQ(kernels::parse_isa("scalar"), kernels::Isa::Scalar);
  EXPECT_EQ(kernels::parse_isa("auto"), kernels::default_isa());
  EXPECT_THROW(kernels::parse_isa("neon"), std::invalid_argument);
  EXPECT_EQ(kernels::name(kernels::Isa::Avx2), "avx2");
}

TEST(Kernels, LogIntegrandEquivalence) {
  if (!avx2_ready()) GTEST_SKIP() << "AVX2 not available";
  std::mt19937_64 rng(20240611);
  const auto& scalar = kernels::table(kernels::Isa::Scalar);
  const auto& avx2 = kernels::table(kernels::Isa::Avx2);
  for (const auto& space : default_catalog()) {
    for (int n : {0, 1, 3, 8, 16}) {
      for (double tau : {1e-3, 0.25, 4.0, 100.0}) {
        for (double tp : {0.0, 0.5 * (space.m - 1) * 2.0}) {
          Case c = make_case(space, n, tau, tp);
          c.f.coeffs = c.signed_coeffs;
          const double hi = std::max(8.0 * std::sqrt(tau), 0.5 * (space.m + 2.0 * n) * tau + 10.0);
          const auto t = sample_points(rng, 203, hi);  // odd length exercises the tail
          std::vector<double> la(t.size()), sa(t.size()), lb(t.size()), sb(t.size());
          scalar.log_integrand(c.f, t, la, sa);
          avx2.log_integrand(c.f, t, lb, sb);
          for (std::size_t i = 0; i < t.size(); ++i) {
            ASSERT_EQ(sa[i], sb[i]) << space.name() << " n=" << n << " t=" << t[i];
            if (std::isinf(la[i])) {
              EXPECT_EQ(la[i], lb[i]);
              continue;
            }
            const double scale = 1.0 + std::fabs(t[i] * t[i] / tau) + std::fabs(la[i]);
            EXPECT_NEAR(la[i], lb[i], 2e-14 * scale)
                << space.name() << " n=" << n << " tau=" << tau << " t=" << t[i];
          }
        }
      }
    }
  }
}

TEST(Kernels, MomentEquivalence) {
  if (!avx2_ready()) GTEST_SKIP() << "AVX2 not available";
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& scalar = kernels::table(kernels::Isa::Scalar);
  const auto& avx2 = kernels::table(kernels::Isa::Avx2);
  for (std::size_t len : {1u, 3u, 4u, 16u, 37u, 256u}) {
    std::vector<double> w(len), l(len), s(len), u(len);
    for (std::size_t i = 0; i < len; ++i) {
      w[i] = unit(rng);
      l[i] = -40.0 * unit(rng);
      s[i] = unit(rng) < 0.1 ? -1.0 : 1.0;
      u[i] = 5.0 * unit(rng);
    }
    const kernels::Moments a = scalar.moments(w, l, s, u, -3.0);
    const kernels::Moments b = avx2.moments(w, l, s, u, -3.0);
    EXPECT_NEAR(a.m0, b.m0, 1e-13 * std::fabs(a.m0) + 1e-300);
    EXPECT_NEAR(a.m1, b.m1, 1e-13 * std::fabs(a.m1) + 1e-300);
    EXPECT_NEAR(a.m2, b.m2, 1e-13 * std::fabs(a.m2) + 1e-300);
    const double ca = scalar.centered(w, l, s, u, -3.0, 2.0);
    const double cb = avx2.centered(w, l, s, u, -3.0, 2.0);
    EXPECT_NEAR(ca, cb, 1e-13 * std::fabs(ca) + 1e-300);
  }
}

TEST(Kernels, QuadratureAgreesAcrossIsas) {
  if (!avx2_ready()) GTEST_SKIP() << "AVX2 not available";
  QuadOptions s;
  s.isa = kernels::Isa::Scalar;
  QuadOptions v;
  v.isa = kernels::Isa::Avx2;
  for (const auto& space : default_catalog()) {
    for (int n : {0, 2, 5}) {
      for (double tau : {0.01, 1.0, 4.0, 50.0}) {
        const LogDerivatives a = q_chi_derivatives(space, n, tau, s);
        const LogDerivatives b = q_chi_derivatives(space, n, tau, v);
        EXPECT_NEAR(a.q.log_value, b.q.log_value, 1e-11 * (1.0 + std::fabs(a.q.log_value)))
            << space.name() << " n=" << n << " tau=" << tau;
        EXPECT_NEAR(a.d2, b.d2, 1e-8 * (1.0 + std::fabs(a.d2)))
            << space.name() << " n=" << n << " tau=" << tau;
      }
    }
  }
}
