#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "inlsc/fields.hpp"
#include "inlsc/functionals.hpp"
#include "inlsc/groundstate.hpp"

using namespace inlsc;

namespace {

ModelParams defaults(double sigma = 1.0) { return ModelParams{3, 0.5, sigma, 0.1, 1.0}; }

SmoothProfile profile(const ModelParams& p) {
  SmoothProfile s;
  s.gamma = hardy_exponent(p.d, p.c);
  s.width = 1.3;
  s.a1 = 0.4;
  s.a2 = 0.2;
  return s;
}

}  // namespace

TEST(Dilate, IdentityAtOne) {
  const auto p = defaults();
  auto g = make_grid(20.0, 512);
  const auto u = profile(p).sample(g);
  const auto same = dilate(u, 1.0, p);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(same[i], u[i]);
  const auto same2 = scale_amplitude_dilate(u, 1.0, 1.0, p);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(same2[i], u[i]);
}

TEST(Dilate, ScalingLaws) {
  const auto p = defaults(1.5);
  auto g = make_grid(20.0, 4096);
  const Functionals f(g, p);
  const auto u = profile(p).sample(g);
  const auto r0 = f.report(u);
  const double k = dilation_exponent(p);
  for (double l : {0.7, 1.1, 1.6}) {
    const auto r = f.report(dilate(u, l, p));
    EXPECT_NEAR(r.mass / r0.mass, 1.0, 1e-6) << l;
    EXPECT_NEAR(r.hardy_seminorm_sq / (l * l * r0.hardy_seminorm_sq), 1.0, 1e-5) << l;
    EXPECT_NEAR(r.potential / (std::pow(l, k) * r0.potential), 1.0, 1e-5) << l;
  }
}

TEST(Dilate, ExactSamplingAgreesWithInterpolation) {
  const auto p = defaults();
  auto g = make_grid(20.0, 4096);
  const Functionals f(g, p);
  const auto prof = profile(p);
  const auto a = dilate(prof.sample(g), 1.2, p);
  const auto b = prof.sample(g, 1.2);
  EXPECT_LT(f.h1_norm(a.axpy(-1.0, b)) / f.h1_norm(b), 1e-4);
}

TEST(Dilate, SupportLossWhenShrinkingPushesMassOut) {
  const auto p = defaults();
  auto g = make_grid(10.0, 512);
  // mass out to r ~ 8; lambda = 0.5 would need data out to r = 20
  const auto wide = gaussian(g, 3.0);
  EXPECT_THROW(dilate(wide, 0.5, p), SupportLoss);
  EXPECT_NO_THROW(dilate(gaussian(g, 0.5), 0.5, p));
  EXPECT_THROW(dilate(wide, 0.0, p), Error);
}

TEST(ScaleAmplitudeDilate, MassScalesWithMuSquared) {
  const auto p = defaults();
  auto g = make_grid(20.0, 4096);
  const Functionals f(g, p);
  const auto u = profile(p).sample(g);
  const double m0 = f.mass(u);
  EXPECT_NEAR(f.mass(scale_amplitude_dilate(u, 1.3, 1.2, p)) / (1.69 * m0), 1.0, 1e-6);
  EXPECT_THROW(scale_amplitude_dilate(u, 0.0, 1.2, p), Error);
}

// E(mu phi_lambda) = (1/2)(1 - mu^sigma) mu^2 lambda^2 T(phi) when E(phi) = 0.
TEST(ScaleAmplitudeDilate, MassCriticalEnergyClosedForm) {
  const auto p = defaults(1.0);
  auto g = make_grid(20.0, 4096);
  const auto gs = solve_ground_state(p, g);
  const Functionals f(g, p);
  const double t = gs.report.hardy_seminorm_sq;
  EXPECT_LT(std::abs(f.report(scale_amplitude_dilate(gs.phi, 1.0, 1.0, p)).energy), 1e-6 * gs.report.h_omega);
  for (auto [mu, lam] : {std::pair{1.1, 1.1}, {1.05, 1.2}, {1.2, 0.9}}) {
    const double e = f.report(scale_amplitude_dilate(gs.phi, mu, lam, p)).energy;
    const double closed = 0.5 * (1.0 - std::pow(mu, p.sigma)) * mu * mu * lam * lam * t;
    EXPECT_NEAR(e / closed, 1.0, 1e-4) << mu << " " << lam;
    EXPECT_LT(e, 0.0);
  }
}

TEST(ActionAlongDilation, ClosedFormMatchesDilatedFields) {
  const auto p = defaults(1.5);
  auto g = make_grid(20.0, 4096);
  const Functionals f(g, p);
  const auto prof = profile(p);
  const auto u = prof.sample(g);
  const std::vector<double> lambdas{0.6, 0.9, 1.0, 1.3, 2.0};
  const auto samples = action_along_dilation(u, p, lambdas);
  ASSERT_EQ(samples.size(), lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const auto r = f.report(prof.sample(g, lambdas[k]));
    EXPECT_NEAR(samples[k].action / r.action, 1.0, 1e-9);
    EXPECT_NEAR(samples[k].nehari / r.nehari, 1.0, 1e-9);
    EXPECT_NEAR(samples[k].virial_g / r.virial_g, 1.0, 1e-9);
  }
}

TEST(ActionAlongDilation, GIsTheScaleDerivative) {
  const auto p = defaults(0.5);
  auto g = make_grid(20.0, 2048);
  const auto u = profile(p).sample(g);
  const auto base = report(u, p);
  const double h = 1e-5;
  for (double l : {0.5, 1.0, 1.7}) {
    const double fd = (dilation_sample(base, p, l + h).action - dilation_sample(base, p, l - h).action) / (2 * h);
    EXPECT_NEAR(l * fd, dilation_sample(base, p, l).virial_g, 1e-7 * base.h_omega);
  }
  EXPECT_NEAR(dilation_sample(base, p, 1.0).virial_g, base.virial_g, 1e-12 * base.h_omega);
}

TEST(ActionAlongDilation, NehariLimits) {
  const auto p = defaults(1.5);
  auto g = make_grid(20.0, 1024);
  const auto base = report(profile(p).sample(g), p);
  EXPECT_NEAR(dilation_sample(base, p, 1e-6).nehari, p.omega * base.mass, 1e-9 * base.mass);
  EXPECT_LT(dilation_sample(base, p, 50.0).nehari, -1e3 * base.h_omega);
}

TEST(ActionAlongDilation, StationaryScale) {
  const auto p = defaults(1.5);
  auto g = make_grid(20.0, 1024);
  const auto base = report(profile(p).sample(g), p);
  const double ls = dilation_stationary_scale(base, p);
  const double h = 1e-6;
  const double slope = dilation_sample(base, p, ls + h).action - dilation_sample(base, p, ls - h).action;
  EXPECT_NEAR(slope / (2 * h), 0.0, 1e-6 * base.h_omega);
  EXPECT_TRUE(std::isnan(dilation_stationary_scale(base, defaults(1.0))));
}
