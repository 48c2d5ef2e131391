#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "inlsc/model.hpp"

using namespace inlsc;

namespace {

ModelParams params(int d, double b, double sigma, double c, double omega) {
  return ModelParams{d, b, sigma, c, omega};
}

}  // namespace

TEST(Validate, AcceptsDefaultPoint) {
  EXPECT_FALSE(validate(params(3, 0.5, 1.0, 0.1, 1.0)).has_value());
}

TEST(Validate, CouplingMustStayBelowCriticalValue) {
  auto err = validate(params(3, 0.5, 1.0, 0.25, 1.0));
  ASSERT_TRUE(err.has_value());
  EXPECT_EQ(err->constraint(), "c");
}

TEST(Validate, PowerMustStayBelowEnergyCritical) {
  // (4 - 2b)/(d - 2) = 2 at b = 1
  auto err = validate(params(3, 1.0, 2.0, 0.1, 1.0));
  ASSERT_TRUE(err.has_value());
  EXPECT_EQ(err->constraint(), "sigma");
}

TEST(Validate, EachConstraintIsNamed) {
  EXPECT_EQ(validate(params(2, 0.5, 1.0, 0.1, 1.0))->constraint(), "d");
  EXPECT_EQ(validate(params(3, 0.0, 1.0, 0.1, 1.0))->constraint(), "b");
  EXPECT_EQ(validate(params(3, 2.0, 1.0, 0.1, 1.0))->constraint(), "b");
  EXPECT_EQ(validate(params(3, 0.5, 0.0, 0.1, 1.0))->constraint(), "sigma");
  EXPECT_EQ(validate(params(3, 0.5, 1.0, 0.0, 1.0))->constraint(), "c");
  EXPECT_EQ(validate(params(3, 0.5, 1.0, 0.1, 0.0))->constraint(), "omega");
  EXPECT_EQ(validate(params(3, 0.5, std::numeric_limits<double>::quiet_NaN(), 0.1, 1.0))->constraint(),
            "sigma");
  EXPECT_THROW(require_valid(params(3, 0.5, 1.0, 0.3, 1.0)), ValidationError);
}

TEST(Validate, NegativeCouplingIsAdmissible) {
  EXPECT_FALSE(validate(params(3, 0.5, 1.0, -2.0, 1.0)).has_value());
  EXPECT_FALSE(validate(params(5, 0.5, 0.5, 2.2, 1.0)).has_value());  // c(5) = 2.25
}

TEST(Classify, ThreeRegimes) {
  auto mc = classify(params(3, 0.5, 1.0, 0.1, 1.0));
  EXPECT_EQ(mc.tag, RegimeTag::MassCritical);
  EXPECT_NEAR(mc.s_c, 0.0, 1e-15);

  auto sub = classify(params(3, 0.5, 0.5, 0.1, 1.0));
  EXPECT_EQ(sub.tag, RegimeTag::MassSubcritical);
  EXPECT_DOUBLE_EQ(sub.s_c, -1.5);

  auto inter = classify(params(3, 0.5, 1.5, 0.1, 1.0));
  EXPECT_EQ(inter.tag, RegimeTag::Intercritical);
  EXPECT_DOUBLE_EQ(inter.s_c, 0.5);
}

TEST(Classify, ToleranceBandAroundMassCritical) {
  // sigma = (4 - 2b)/d computed in floating point
  auto p = params(5, 0.3, (4.0 - 0.6) / 5.0, 0.1, 1.0);
  EXPECT_EQ(classify(p).tag, RegimeTag::MassCritical);
  p.sigma += 1e-9;
  EXPECT_EQ(classify(p).tag, RegimeTag::Intercritical);
}

TEST(HardyExponent, SolvesIndicialEquation) {
  for (int d : {3, 4, 5}) {
    for (double c : {-1.0, 0.1, 0.2}) {
      const double g = hardy_exponent(d, c);
      // gamma (gamma + d - 2) + c = 0
      EXPECT_NEAR(g * (g + d - 2) + c, 0.0, 1e-14);
    }
  }
  EXPECT_DOUBLE_EQ(hardy_exponent(3, -0.75), 0.5);
}

TEST(Grid, UniformNodes) {
  auto g = make_grid(20.0, 4096, GridScheme::Uniform);
  const double h = 20.0 / 4096;
  auto r = g->nodes();
  ASSERT_EQ(r.size(), 4096u);
  for (std::size_t i : {0u, 1u, 100u, 4095u}) EXPECT_NEAR(r[i], (i + 1) * h, 1e-13);
  EXPECT_EQ(r.back(), 20.0);
}

TEST(Grid, BallVolume) {
  const double exact = 4.0 * std::numbers::pi * 8000.0 / 3.0;  // 33510.32...
  for (auto scheme : {GridScheme::Uniform, GridScheme::Graded}) {
    auto g = make_grid(20.0, 4096, scheme);
    EXPECT_NEAR(g->integrate([](double) { return 1.0; }) / exact, 1.0, 1e-12) << to_string(scheme);
  }
}

TEST(Grid, GaussianIntegral) {
  const double exact = std::pow(std::numbers::pi, 1.5);
  for (auto scheme : {GridScheme::Uniform, GridScheme::Graded}) {
    auto g = make_grid(20.0, 4096, scheme);
    const double q = g->integrate([](double r) { return std::exp(-r * r); });
    EXPECT_LT(std::abs(q - exact) / exact, 1e-8) << to_string(scheme);
  }
}

TEST(Grid, QuadratureErrorShrinksUnderRefinement) {
  // r^2 e^{-r}: mass 4 pi * 4! in d = 3
  const double exact = 4.0 * std::numbers::pi * 24.0;
  double prev = 1.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    auto g = make_grid(40.0, n, GridScheme::Graded);
    const double err = std::abs(g->integrate([](double r) { return r * r * std::exp(-r); }) - exact) / exact;
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(Grid, OtherDimensions) {
  // unit-width Gaussian in d = 5: pi^{5/2}
  auto g = make_grid(20.0, 2048, GridScheme::Graded, 5);
  const double q = g->integrate([](double r) { return std::exp(-r * r); });
  EXPECT_NEAR(q / std::pow(std::numbers::pi, 2.5), 1.0, 1e-10);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(make_grid(20.0, 8), Error);
  EXPECT_THROW(make_grid(0.0, 64), Error);
  EXPECT_THROW(make_grid(-1.0, 64), Error);
}

TEST(Grid, GradedMapInverts) {
  auto g = make_grid(20.0, 256);
  for (double r : {1e-6, 0.3, 1.0, 7.5, 20.0}) EXPECT_NEAR(g->map(g->inverse_map(r)), r, 1e-12 * (1 + r));
}

TEST(Field, RejectsNonFiniteValues) {
  auto g = make_grid(10.0, 64);
  std::vector<cplx> v(64, 1.0);
  v[10] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(RadialField(g, v), NonFiniteField);
  v[10] = cplx(0.0, std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(RadialField(g, v), NonFiniteField);
  EXPECT_THROW(RadialField(g, std::vector<cplx>(63)), Error);
}

TEST(Field, Arithmetic) {
  auto g = make_grid(10.0, 64);
  auto a = RadialField::from_function(g, [](double r) { return r; });
  auto b = a.scaled(2.0).axpy(-1.0, a);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(b[i].real(), a[i].real());
  EXPECT_TRUE(a.is_real());
  auto z = a.scaled(cplx(0.0, 1.0));
  EXPECT_FALSE(z.is_real());
  EXPECT_EQ(z.conj()[3], cplx(0.0, -a[3].real()));
}
