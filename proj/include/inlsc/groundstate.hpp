#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "inlsc/banded.hpp"
#include "inlsc/fields.hpp"
#include "inlsc/functionals.hpp"

namespace inlsc {

struct NehariProjection {
  double lambda;
  RadialField projected;
};

inline double nehari_scale(const FunctionalReport& rep, const ModelParams& p) {
  if (!(rep.potential > 0.0)) throw DegenerateField("nehari_project: P(u) = 0");
  return std::pow(rep.h_omega / rep.potential, 1.0 / p.sigma);
}

inline NehariProjection nehari_project(const RadialField& u, const ModelParams& params) {
  const double lam = nehari_scale(report(u, params), params);
  return {lam, u.scaled(lam)};
}

// Relative defects of the two Pohozaev identities
//   omega M = (4-2b-(d-2)sigma) / (2(sigma+2)) P
//   omega M = (4-2b-(d-2)sigma) / (d sigma + 2b) ||u||^2_{Hdot^1_c}
struct PohozaevDefects {
  double potential_form = 0.0;
  double kinetic_form = 0.0;
};

inline PohozaevDefects pohozaev_defects(const FunctionalReport& rep, const ModelParams& p) {
  const double num = 4.0 - 2.0 * p.b - (p.d - 2) * p.sigma;
  const double om = p.omega * rep.mass;
  PohozaevDefects out;
  out.potential_form = std::abs(om - num / (2.0 * (p.sigma + 2.0)) * rep.potential) / om;
  out.kinetic_form = std::abs(om - num / (p.d * p.sigma + 2.0 * p.b) * rep.hardy_seminorm_sq) / om;
  return out;
}

struct GroundStateOptions {
  double tol = 1e-8;  // on ||S'_omega(phi)||_{L^2}
  int max_iter = 50000;
};

struct GroundStateResult {
  RadialField phi;
  double action_level = 0.0;
  double residual = 0.0;
  PohozaevDefects pohozaev;
  int iterations = 0;
  double tolerance = 0.0;
  FunctionalReport report;
  std::vector<double> accepted_actions;  // S_omega after each accepted step
};

// Projected gradient descent on the Nehari manifold.
//
// Each iteration takes a Sobolev-preconditioned gradient step
//   v <- |v - tau (K + omega W)^-1 S'(v)|,  then rescales onto K_omega = 0.
// The step is accepted if the action does not increase (up to rounding of
// the functionals); tau then grows by 1.1 up to 1, otherwise it halves.
// Everything runs on the regularized profile v = r^-gamma u.
inline GroundStateResult solve_ground_state(const ModelParams& params, const GridPtr& grid,
                                            const GroundStateOptions& opts = {},
                                            const std::optional<RadialField>& init = std::nullopt) {
  require_valid(params);
  if (!(opts.tol > 0.0)) throw Error("solve_ground_state: tol must be positive");
  const Discretization disc(grid, params);
  const std::size_t n = disc.size();
  const double om = params.omega, sig = params.sigma;
  auto wv = disc.mass_weights_v();
  auto q = disc.potential_weights_v();

  std::vector<double> v(n);
  {
    const RadialField u0 = init ? *init : gaussian(grid);
    if (u0.size() != n) throw Error("solve_ground_state: init lives on another grid");
    auto reg = disc.regularizer();
    for (std::size_t i = 0; i < n; ++i) v[i] = std::abs(u0[i]) * reg[i];
  }

  struct Scalars {
    double t, m, p;
  };
  const Power pw_pot(0.5 * (sig + 2.0)), pw_rate(0.5 * sig);
  auto scalars = [&](const std::vector<double>& x) {
    Scalars s{disc.hardy_v<double>(x), 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double a2 = x[i] * x[i];
      s.m += wv[i] * a2;
      s.p += q[i] * pw_pot(a2);
    }
    return s;
  };
  auto action = [&](const Scalars& s) { return 0.5 * s.t + 0.5 * om * s.m - s.p / (sig + 2.0); };
  // Rescale onto the Nehari manifold; returns the scalars of the result.
  auto project = [&](std::vector<double>& x) {
    Scalars s = scalars(x);
    if (!(s.p > 0.0)) throw DegenerateField("solve_ground_state: P vanished");
    if (!(s.t + om * s.m >= 1e-14)) throw DegenerateField("solve_ground_state: iterate collapsed");
    const double lam = std::pow((s.t + om * s.m) / s.p, 1.0 / sig);
    for (auto& z : x) z *= lam;
    return Scalars{s.t * lam * lam, s.m * lam * lam, s.p * std::pow(lam, sig + 2.0)};
  };

  BandedMatrix<double> a = disc.stiffness_v();
  for (std::size_t i = 0; i < n; ++i) a(i, i) += om * wv[i];
  BandedMatrix<double> a_copy = a;
  const BandedLU<double> pre(std::move(a_copy));

  Scalars cur = project(v);
  double s_cur = action(cur);
  std::vector<double> history{s_cur};
  std::vector<double> grad(n), dir(n), trial(n);
  double tau = 1.0, res = std::numeric_limits<double>::infinity();
  int it = 0;
  for (;; ++it) {
    a.multiply<double, double>(v, grad);
    for (std::size_t i = 0; i < n; ++i) grad[i] -= q[i] * pw_rate(v[i] * v[i]) * v[i];
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += grad[i] * grad[i] / wv[i];
    res = std::sqrt(r2);
    if (!std::isfinite(res)) throw DegenerateField("solve_ground_state: non-finite residual");
    if (res <= opts.tol) break;
    if (it >= opts.max_iter)
      throw NoConvergence("solve_ground_state: residual " + std::to_string(res) + " after " +
                          std::to_string(it) + " iterations");

    dir = grad;
    pre.solve<double>(dir);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = std::abs(v[i] - tau * dir[i]);
      const Scalars st = project(trial);
      const double s_new = action(st);
      if (s_new <= s_cur + 1e-12 * std::abs(s_cur)) {
        v.swap(trial);
        cur = st;
        s_cur = s_new;
        history.push_back(s_cur);
        tau = std::min(1.0, 1.1 * tau);
        break;
      }
      tau *= 0.5;
      if (tau < 1e-14)
        throw NoConvergence("solve_ground_state: step size collapsed at residual " +
                            std::to_string(res));
    }
  }

  std::vector<cplx> u(n);
  auto unreg = disc.unregularizer();
  for (std::size_t i = 0; i < n; ++i) u[i] = v[i] * unreg[i];
  RadialField phi(grid, std::move(u));
  const auto rep = Functionals(std::make_shared<const Discretization>(disc)).report(phi);
  return GroundStateResult{std::move(phi), rep.action, res, pohozaev_defects(rep, params), it,
                           opts.tol, rep, std::move(history)};
}

// ---------------------------------------------------------------------------
// Certificate.

struct CertifyOptions {
  int gn_trials = 100;
  std::uint64_t seed = 20240611;
  bool refine = true;
  bool throw_on_failure = true;
};

struct CertificateReport {
  double tolerance = 0.0;   // defects are held to 10 * tolerance
  double stationarity_residual = 0.0;
  double nehari_defect = 0.0;  // |K_omega| / H_omega
  PohozaevDefects pohozaev;
  double virial_defect = 0.0;  // |G| / H_omega
  double stationary_scale = 0.0;  // critical point of lambda -> S(phi_lambda), NaN if none
  double dilation_peak_defect = 0.0;
  bool slope_check_applicable = false;
  std::array<double, 4> slope_lambdas{0.5, 0.9, 1.1, 2.0};
  std::array<double, 4> slopes{};  // d/dlambda S_omega(phi_lambda)
  bool slope_signs_ok = true;
  std::size_t refined_n = 0;
  double refined_residual = 0.0;
  double refined_action_level = 0.0;
  double refinement_change = 0.0;  // relative change of s(omega)
  double gn_quotient = 0.0;
  double gn_max_trial = 0.0;
  double gn_margin = 0.0;
  bool radial_ansatz = true;
  std::string regime;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

inline CertificateReport evaluate_certificate(const GroundStateResult& res, const ModelParams& params,
                                              const CertifyOptions& opts = {}) {
  CertificateReport c;
  c.tolerance = res.tolerance;
  const double bound = 10.0 * res.tolerance;
  const GridPtr& grid = res.phi.grid_ptr();
  const Functionals f(grid, params);
  const auto rep = f.report(res.phi);
  const auto regime = classify(params);
  c.regime = std::string(to_string(regime.tag));

  c.stationarity_residual = f.l2_norm(f.gradient(res.phi));
  c.nehari_defect = std::abs(rep.nehari) / rep.h_omega;
  c.pohozaev = pohozaev_defects(rep, params);
  c.virial_defect = std::abs(rep.virial_g) / rep.h_omega;
  c.stationary_scale = dilation_stationary_scale(rep, params);
  c.dilation_peak_defect = std::isnan(c.stationary_scale)
                               ? std::abs(rep.virial_g) / rep.hardy_seminorm_sq
                               : std::abs(c.stationary_scale - 1.0);

  // The sign pattern +,+,-,- belongs to the intercritical maximum.
  c.slope_check_applicable = regime.tag == RegimeTag::Intercritical;
  for (std::size_t k = 0; k < 4; ++k) {
    const double l = c.slope_lambdas[k];
    c.slopes[k] = dilation_sample(rep, params, l).virial_g / l;
  }
  if (c.slope_check_applicable)
    c.slope_signs_ok = c.slopes[0] > 0 && c.slopes[1] > 0 && c.slopes[2] < 0 && c.slopes[3] < 0;

  if (opts.refine) {
    const RadialGrid& g = *grid;
    auto fine = make_grid(g.r_max(), 2 * g.size(), g.scheme(), g.dimension());
    auto init = resample(res.phi, fine, hardy_exponent(params.d, params.c));
    GroundStateOptions go;
    go.tol = res.tolerance;
    const auto r2 = solve_ground_state(params, fine, go, init);
    c.refined_n = fine->size();
    c.refined_residual = r2.residual;
    c.refined_action_level = r2.action_level;
    c.refinement_change = std::abs(r2.action_level - res.action_level) / std::abs(res.action_level);
  }

  if (opts.gn_trials > 0) {
    // J is independent of omega; trial fields are compared against phi itself.
    c.gn_quotient = f.gn_quotient(res.phi);
    c.gn_max_trial = -std::numeric_limits<double>::infinity();
    for (const auto& t : gn_trial_fields(grid, params, opts.gn_trials, opts.seed))
      c.gn_max_trial = std::max(c.gn_max_trial, f.gn_quotient(t));
    c.gn_margin = c.gn_quotient - c.gn_max_trial;
  }

  auto check = [&](bool ok, const std::string& what) {
    if (!ok) c.failures.push_back(what);
  };
  check(c.stationarity_residual <= bound, "stationarity residual");
  check(c.nehari_defect <= bound, "Nehari defect");
  check(c.pohozaev.potential_form <= bound, "Pohozaev identity (potential form)");
  check(c.pohozaev.kinetic_form <= bound, "Pohozaev identity (kinetic form)");
  check(c.dilation_peak_defect <= bound, "dilation peak");
  check(c.slope_signs_ok, "dilation slope signs");
  if (opts.refine) {
    check(c.refined_residual <= bound, "refined-grid residual");
    check(c.refinement_change <= bound, "refined-grid action level");
  }
  if (opts.gn_trials > 0) check(c.gn_margin >= -bound, "GN optimality margin");
  return c;
}

inline CertificateReport certify(const GroundStateResult& res, const ModelParams& params,
                                 const CertifyOptions& opts = {}) {
  auto c = evaluate_certificate(res, params, opts);
  if (!c.passed() && opts.throw_on_failure) {
    std::string msg = "certify: defects above 10x tolerance:";
    for (const auto& f : c.failures) msg += " [" + f + "]";
    throw CertificationFailure(msg);
  }
  return c;
}

}  // namespace inlsc
