#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "inlsc/evolution.hpp"
#include "inlsc/fields.hpp"
#include "inlsc/groundstate.hpp"

using namespace inlsc;

namespace {

ModelParams defaults(double sigma = 1.0) { return ModelParams{3, 0.5, sigma, 0.1, 1.0}; }

RadialField smooth_data(const GridPtr& g, const ModelParams& p, double amp = 1.0) {
  SmoothProfile s;
  s.gamma = hardy_exponent(p.d, p.c);
  s.width = 1.5;
  s.a2 = 0.3;
  s.chirp = 0.2;
  s.amp = amp;
  return s.sample(g);
}

double mass_v(const Discretization& d, const std::vector<cplx>& v) {
  auto wv = d.mass_weights_v();
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m += wv[i] * std::norm(v[i]);
  return m;
}

}  // namespace

TEST(Strang, LinearSubstepIsUnitary) {
  const auto p = defaults();
  auto g = make_grid(20.0, 1024);
  auto disc = std::make_shared<const Discretization>(g, p);
  Propagator prop(disc, StepScheme::Strang);
  auto v = disc->to_v<cplx>(smooth_data(g, p).values());
  const double m0 = mass_v(*disc, v);
  for (int k = 0; k < 10; ++k) prop.linear_step(v, 1e-2);
  EXPECT_NEAR(mass_v(*disc, v) / m0, 1.0, 1e-12);
}

TEST(Strang, NonlinearSubstepKeepsModulus) {
  const auto p = defaults();
  auto g = make_grid(20.0, 512);
  auto disc = std::make_shared<const Discretization>(g, p);
  const Propagator prop(disc, StepScheme::Strang);
  auto v = disc->to_v<cplx>(smooth_data(g, p).values());
  const auto before = v;
  prop.nonlinear_phase(v, 0.3);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(v[i]), std::abs(before[i]), 1e-15 * (1 + std::abs(v[i])));
}

TEST(Strang, FullStepConservesMass) {
  const auto p = defaults();
  auto g = make_grid(20.0, 1024);
  const Functionals f(g, p);
  const auto u = smooth_data(g, p);
  const auto next = step(u, p, 1e-3, StepScheme::Strang);
  EXPECT_NEAR(f.mass(next) / f.mass(u), 1.0, 1e-12);
}

TEST(Conservative, StepConservesMassAndEnergy) {
  const auto p = defaults(1.5);
  auto g = make_grid(20.0, 1024);
  const Functionals f(g, p);
  auto u = smooth_data(g, p, 1.5);
  const auto r0 = f.report(u);
  for (int k = 0; k < 20; ++k) u = step(u, p, 5e-3);
  const auto r1 = f.report(u);
  EXPECT_NEAR(r1.mass / r0.mass, 1.0, 1e-12);
  EXPECT_NEAR(r1.energy, r0.energy, 1e-10 * r0.h_omega);
  EXPECT_THROW(step(u, p, 0.0), StepFailure);
}

TEST(Evolve, StandingWave) {
  const auto p = defaults(0.5);
  auto g = make_grid(20.0, 2048);
  const auto gs = solve_ground_state(p, g);
  EvolutionConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_end = 0.5;
  cfg.sample_every = 25;
  const auto tr = evolve(gs.phi, p, cfg, gs.phi);
  EXPECT_EQ(tr.outcome.kind, OutcomeKind::CompletedGlobal);
  EXPECT_NEAR(tr.samples.back().t, 0.5, 1e-12);
  for (std::size_t k = 1; k < tr.samples.size(); ++k) EXPECT_GT(tr.samples[k].t, tr.samples[k - 1].t);
  for (const auto& s : tr.samples) EXPECT_LT(s.distance->absolute, 1e-4);
  EXPECT_LT(tr.max_mass_drift, 1e-10);
  EXPECT_LT(tr.max_energy_drift, 1e-6);
  // the standing wave rotates as e^{i omega t}
  const auto d = Functionals(g, p).distance_to_orbit(*tr.final_state, gs.phi);
  EXPECT_NEAR(d.phase, 0.5 * p.omega, 1e-4);

  EXPECT_FALSE(monitor_g_criterion(tr, 1e-3));
}

// NLS is reversible: conj(u(t)) evolved for t returns conj(u0).
TEST(Evolve, TimeReversal) {
  const auto p = defaults(1.0);
  auto g = make_grid(20.0, 1024);
  const Functionals f(g, p);
  const auto u0 = smooth_data(g, p);
  EvolutionConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 0.5;
  cfg.adapt_to_concentration = false;
  const auto fwd = evolve(u0, p, cfg);
  const auto back = evolve(fwd.final_state->conj(), p, cfg).final_state->conj();
  EXPECT_LT(f.l2_norm(back.axpy(-1.0, u0)) / f.l2_norm(u0), 1e-5);
}

// With c = -0.75, b = 0.5, sigma = 1 the weight r^-b |u|^sigma becomes |v|
// (gamma = 1/2) and the flow is smooth, so the scheme's full order shows.
TEST(Evolve, SecondOrderOnSmoothProblem) {
  auto p = defaults(1.0);
  p.c = -0.75;
  auto g = make_grid(20.0, 1024);
  const Functionals f(g, p);
  const auto u0 = smooth_data(g, p, 1.5);
  auto run = [&](double dt) {
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 0.5;
    cfg.adapt_to_concentration = false;
    cfg.sample_every = 1000;
    return *evolve(u0, p, cfg).final_state;
  };
  const auto ref = run(0.01 / 8);
  const double e1 = f.h1_norm(run(0.02).axpy(-1.0, ref));
  const double e2 = f.h1_norm(run(0.01).axpy(-1.0, ref));
  EXPECT_NEAR(e1 / e2, 4.0, 0.6);
}

TEST(Evolve, FlagsMassCriticalBlowup) {
  const auto p = defaults(1.0);
  auto g = make_grid(20.0, 2048);
  const auto gs = solve_ground_state(p, g);
  const auto u0 = scale_amplitude_dilate(gs.phi, 1.2, 1.2, p);
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 5.0;
  const auto tr = evolve(u0, p, cfg, gs.phi);
  EXPECT_EQ(tr.outcome.kind, OutcomeKind::BlowupIndicated);
  EXPECT_LT(tr.outcome.time, 5.0);
  EXPECT_GE(tr.samples.back().h1_norm, 10.0 * tr.samples.front().h1_norm);
  EXPECT_LT(tr.max_energy_drift, 1e-6);
}

TEST(Evolve, RejectsBadConfig) {
  const auto p = defaults();
  auto g = make_grid(20.0, 256);
  const auto u0 = gaussian(g);
  EvolutionConfig cfg;
  cfg.dt = -1;
  EXPECT_THROW(evolve(u0, p, cfg), Error);
  cfg.dt = 1e-3;
  cfg.blowup_factor = 1.0;
  EXPECT_THROW(evolve(u0, p, cfg), Error);
}

TEST(MonitorG, Cases) {
  EvolutionTrace tr;
  EXPECT_THROW(monitor_g_criterion(tr, 0.1), Error);
  TraceSample s;
  s.report.virial_g = -0.5;
  tr.samples.push_back(s);
  EXPECT_TRUE(monitor_g_criterion(tr, 0.5));
  EXPECT_FALSE(monitor_g_criterion(tr, 0.6));
  s.report.virial_g = -0.1;
  tr.samples.push_back(s);
  EXPECT_FALSE(monitor_g_criterion(tr, 0.5));
  EXPECT_TRUE(monitor_g_criterion(tr, 0.1));
}
