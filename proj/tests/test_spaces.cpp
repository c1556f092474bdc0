#include "qflat/spaces.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qflat;

TEST(MakeSpace, SphereThree) {
  const RootData s = make_space(Family::Sphere, 3);
  EXPECT_EQ(s.m, 3);
  EXPECT_EQ(s.m_beta, 2);
  EXPECT_EQ(s.m_half, 0);
  EXPECT_EQ(s.B, 1.0);
}

TEST(MakeSpace, ComplexProjectivePlane) {
  const RootData s = make_space(Family::ComplexProjective, 2);
  EXPECT_EQ(s.m, 4);
  EXPECT_EQ(s.m_beta, 1);
  EXPECT_EQ(s.m_half, 2);
}

TEST(MakeSpace, CayleyPlane) {
  const RootData s = make_space(Family::CayleyPlane);
  EXPECT_EQ(s.m, 16);
  EXPECT_EQ(s.m_beta, 7);
  EXPECT_EQ(s.m_half, 8);
}

TEST(MakeSpace, LowDimensionalCoincidences) {
  const RootData cp1 = make_space(Family::ComplexProjective, 1);
  const RootData s2 = make_space(Family::Sphere, 2);
  EXPECT_EQ(cp1.m, s2.m);
  EXPECT_EQ(cp1.m_beta, s2.m_beta);
  EXPECT_EQ(cp1.m_half, s2.m_half);

  const RootData hp1 = make_space(Family::QuaternionicProjective, 1);
  const RootData s4 = make_space(Family::Sphere, 4);
  EXPECT_EQ(hp1.m, s4.m);
  EXPECT_EQ(hp1.m_beta, s4.m_beta);
  EXPECT_EQ(hp1.m_half, s4.m_half);
}

TEST(MakeSpace, RejectsBadSizes) {
  EXPECT_THROW(make_space(Family::Sphere, 1), std::invalid_argument);
  EXPECT_THROW(make_space(Family::ComplexProjective, 0), std::invalid_argument);
  EXPECT_THROW(make_space(Family::QuaternionicProjective, -2), std::invalid_argument);
  EXPECT_THROW(make_space(Family::Sphere, 3, 0.0), std::invalid_argument);
  EXPECT_THROW(make_space(Family::Sphere, 3, -1.0), std::invalid_argument);
}

TEST(ParseSpace, Selectors) {
  EXPECT_EQ(parse_space("S7").m, 7);
  EXPECT_EQ(parse_space("CP3").m, 6);
  EXPECT_EQ(parse_space("HP2").m, 8);
  EXPECT_EQ(parse_space("OP2").m, 16);
  EXPECT_EQ(parse_space("CP2").name(), "CP2");
  EXPECT_THROW(parse_space("X3"), std::invalid_argument);
  EXPECT_THROW(parse_space("S"), std::invalid_argument);
  EXPECT_THROW(parse_space("S3x"), std::invalid_argument);
  EXPECT_THROW(parse_space("OP3"), std::invalid_argument);
  EXPECT_THROW(parse_space(""), std::invalid_argument);
}

TEST(Catalog, OrderAndStructure) {
  const auto catalog = default_catalog();
  std::vector<std::string> names;
  for (const auto& s : catalog) names.push_back(s.name());
  EXPECT_EQ(names, (std::vector<std::string>{"S2", "S3", "S4", "S5", "S7", "CP2", "CP3", "HP2",
                                             "OP2"}));
  for (const auto& s : catalog) {
    EXPECT_EQ(s.m, s.m_beta + s.m_half + 1) << s.name();
    if (s.family == Family::Sphere) {
      EXPECT_EQ(s.m_half, 0) << s.name();
    } else {
      EXPECT_GT(s.m_half, 0) << s.name();
      EXPECT_EQ(s.m_half % 2, 0) << s.name();
    }
    EXPECT_GT(s.B, 0.0);
  }
}

TEST(ChiParams, SphereThree) {
  const RootData s3 = parse_space("S3");
  const ChiParams p = chi_params(s3, 1);
  EXPECT_EQ(p.a, 3);
  EXPECT_EQ(p.b, -1);
  EXPECT_EQ(p.c, make_rational(3, 2));
  EXPECT_EQ(p.A, 2);
  EXPECT_EQ(p.mu, 1);
  EXPECT_EQ(p.kappa, 1);
  EXPECT_EQ(p.nu, 1);
  EXPECT_EQ(p.r, 3);

  const ChiParams q = chi_params(s3, 2);
  EXPECT_EQ(q.a, 4);
  EXPECT_EQ(q.b, -2);
  EXPECT_EQ(q.c, make_rational(3, 2));
}

TEST(ChiParams, ComplexProjectivePlane) {
  const ChiParams p = chi_params(parse_space("CP2"), 1);
  EXPECT_EQ(p.a, 3);
  EXPECT_EQ(p.b, -1);
  EXPECT_EQ(p.c, 2);
  EXPECT_EQ(p.A, 2);
  EXPECT_EQ(p.mu, make_rational(3, 2));
  EXPECT_EQ(p.kappa, make_rational(3, 2));
  EXPECT_EQ(p.nu, make_rational(1, 2));
}

TEST(ChiParams, RejectsNegativeIndex) {
  EXPECT_THROW(chi_params(parse_space("S3"), -1), std::invalid_argument);
}

TEST(EtaRadial, Values) {
  EXPECT_DOUBLE_EQ(eta_radial(parse_space("S3"), 0.0), 8.0);
  EXPECT_NEAR(eta_radial(parse_space("S3"), 1.0), 26.3082328360164866, 1e-12);
  EXPECT_NEAR(eta_radial(parse_space("S2"), 1.0), 7.25372081569403754, 1e-12);
}

TEST(SphereVolume, Values) {
  EXPECT_NEAR(sphere_volume(2), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_volume(3), 4.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_volume(4), 2.0 * std::numbers::pi * std::numbers::pi, 1e-13);
  EXPECT_THROW(sphere_volume(0), std::invalid_argument);
}

TEST(RadialWeights, PolarMatchesReduced) {
  for (const auto& base : default_catalog()) {
    for (double B : {0.5, 1.0, 2.0}) {
      const RootData s = make_space(base.family, base.size, B);
      for (int i = 1; i <= 10; ++i) {
        const double t = 0.37 * i;
        const double polar = polar_weight(s, t / B) / B;
        const double reduced = reduced_weight(s, t);
        EXPECT_NEAR(polar / reduced, 1.0, 1e-12) << s.name() << " B=" << B << " t=" << t;
      }
    }
  }
}
