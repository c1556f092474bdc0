#include "qflat/hypergeom.hpp"
#include "qflat/special.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qflat;

namespace {

const Rational kHalf3 = make_rational(3, 2);

}  // namespace

TEST(Rational, Formatting) {
  EXPECT_EQ(to_string(make_rational(6, 4)), "3/2");
  EXPECT_EQ(to_string(make_rational(4, 2)), "2");
  EXPECT_EQ(to_string(make_rational(-1, 3)), "-1/3");
  EXPECT_TRUE(is_integer(make_rational(8, 4)));
  EXPECT_FALSE(is_integer(make_rational(1, 2)));
  EXPECT_EQ(pow(make_rational(2, 3), 3), make_rational(8, 27));
  EXPECT_EQ(pow(make_rational(5, 7), 0), 1);
  EXPECT_DOUBLE_EQ(to_double(make_rational(1, 4)), 0.25);
}

TEST(Special, GammaHalfIntegers) {
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  EXPECT_DOUBLE_EQ(gamma_function(0.5), sqrt_pi);
  EXPECT_DOUBLE_EQ(gamma_function(1.5), 0.5 * sqrt_pi);
  EXPECT_DOUBLE_EQ(gamma_function(2.5), 0.75 * sqrt_pi);
  EXPECT_DOUBLE_EQ(gamma_function(5.0), 24.0);
  EXPECT_DOUBLE_EQ(gamma_function(1.0), 1.0);
  EXPECT_NEAR(gamma_function(0.3) / std::tgamma(0.3), 1.0, 1e-14);
  EXPECT_NEAR(log_gamma(10.5), std::lgamma(10.5), 1e-12);
}

TEST(Special, RisingFactorial) {
  EXPECT_EQ(rising_factorial(Rational(3), 2), 12);
  EXPECT_EQ(rising_factorial(kHalf3, 2), make_rational(15, 4));
  EXPECT_EQ(rising_factorial(kHalf3, 0), 1);
}

TEST(HypergeomPoly, SphereThreeExamples) {
  const Rational A = 2;
  EXPECT_EQ(hypergeom_poly(A, 0, kHalf3).coeffs, std::vector<Rational>{Rational(1)});
  const RationalPoly p1 = hypergeom_poly(A, 1, kHalf3);
  ASSERT_EQ(p1.coeffs.size(), 2u);
  EXPECT_EQ(p1.coeffs[0], 1);
  EXPECT_EQ(p1.coeffs[1], -2);
  const RationalPoly p2 = hypergeom_poly(A, 2, kHalf3);
  ASSERT_EQ(p2.degree(), 2);
  EXPECT_EQ(p2.coeffs[2], make_rational(16, 3));
}

TEST(HypergeomPoly, RejectsNonpositiveIntegerC) {
  EXPECT_THROW(hypergeom_poly(Rational(2), 2, Rational(0)), std::invalid_argument);
  EXPECT_THROW(hypergeom_poly(Rational(2), 2, Rational(-3)), std::invalid_argument);
  EXPECT_THROW(hypergeom_poly(Rational(2), -1, kHalf3), std::invalid_argument);
  EXPECT_NO_THROW(hypergeom_poly(Rational(2), 2, make_rational(-1, 2)));
}

TEST(ClosedCoeffs, Examples) {
  const ClosedCoeffs c1 = closed_coeffs(Rational(2), 1, kHalf3);
  ASSERT_TRUE(c1.c_n1.has_value());
  EXPECT_EQ(*c1.c_n1, -2);
  EXPECT_EQ(c1.c_nn, -2);
  const ClosedCoeffs c2 = closed_coeffs(Rational(2), 2, kHalf3);
  EXPECT_EQ(c2.c_nn, make_rational(16, 3));
  const ClosedCoeffs c0 = closed_coeffs(make_rational(7, 3), 0, make_rational(5, 2));
  EXPECT_FALSE(c0.c_n1.has_value());
  EXPECT_EQ(c0.c_nn, 1);
}

TEST(ClosedCoeffs, AgreeWithRecurrenceOnCatalog) {
  for (const auto& space : default_catalog()) {
    for (int n = 0; n <= 8; ++n) {
      const ChiParams p = chi_params(space, n);
      const RationalPoly poly = chi_poly(space, n);
      const ClosedCoeffs closed = closed_coeffs(p.A, n, p.c);
      ASSERT_EQ(poly.degree(), n) << space.name();
      EXPECT_EQ(poly.coeffs[0], 1);
      EXPECT_NE(poly.coeffs.back(), 0);
      EXPECT_EQ(poly.coeffs.back(), closed.c_nn) << space.name() << " n=" << n;
      if (n > 0) EXPECT_EQ(poly.coeffs[1], *closed.c_n1) << space.name() << " n=" << n;
    }
  }
}

TEST(EvalFchi, Examples) {
  const RootData s3 = parse_space("S3");
  EXPECT_DOUBLE_EQ(eval_fchi(s3, 0, 1.7), 1.0);
  EXPECT_NEAR(eval_fchi(s3, 1, 1.0), std::cosh(2.0), 1e-14);
  for (const auto& space : default_catalog())
    for (int n = 0; n <= 6; ++n) EXPECT_DOUBLE_EQ(eval_fchi(space, n, 0.0), 1.0);
}

TEST(EvalFchi, EvenInT) {
  for (const auto& space : default_catalog())
    for (int n = 0; n <= 6; ++n)
      for (double t : {0.1, 0.8, 2.3})
        EXPECT_EQ(eval_fchi(space, n, t), eval_fchi(space, n, -t)) << space.name();
}

TEST(EvalFchi, FloatMatchesExact) {
  // sh^2 t = 0, 1, 4 at t = 0, asinh 1, asinh 2.
  const std::pair<double, int> points[] = {{0.0, 0}, {std::asinh(1.0), -1}, {std::asinh(2.0), -4}};
  for (const auto& space : default_catalog()) {
    for (int n = 0; n <= 8; ++n) {
      const RationalPoly poly = chi_poly(space, n);
      for (const auto& [t, x] : points) {
        const double exact = to_double(poly.evaluate(Rational(x)));
        EXPECT_NEAR(eval_fchi(space, n, t) / exact, 1.0, 1e-13)
            << space.name() << " n=" << n << " x=" << x;
      }
    }
  }
}
