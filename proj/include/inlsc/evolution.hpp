#pragma once

// Time integration of i u_t + Δu + c|x|^-2 u + |x|^-b |u|^sigma u = 0 for
// radial fields, on the regularized profile v = r^-gamma u. With W the mass
// weights and K the Hardy stiffness the semi-discrete flow is
//
//   i W v_t = K v - W rate |v|^sigma v,     rate = r^-b r^{gamma sigma}.
//
// Default scheme: Crank-Nicolson with the secant nonlinearity
//
//   (W + i dt/2 (K - W V)) v+ = (W - i dt/2 (K - W V)) v,
//   V = rate * 2/(sigma+2) * (|v+|^{sigma+2} - |v|^{sigma+2}) / (|v+|^2 - |v|^2),
//
// which conserves the discrete mass and energy exactly; the implicit relation
// is solved by fixed-point iteration. Strang splitting (exact phase rotation
// around a linear Crank-Nicolson step) is available as an alternative; its
// pointwise phase is stiff near the origin on graded grids.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "inlsc/banded.hpp"
#include "inlsc/functionals.hpp"
#include "inlsc/power.hpp"

namespace inlsc {

enum class StepScheme { Conservative, Strang };

inline std::string_view to_string(StepScheme s) {
  return s == StepScheme::Conservative ? "conservative" : "strang";
}

inline std::optional<StepScheme> parse_step_scheme(std::string_view s) {
  if (s == "conservative") return StepScheme::Conservative;
  if (s == "strang") return StepScheme::Strang;
  return std::nullopt;
}

class Propagator {
 public:
  Propagator(std::shared_ptr<const Discretization> disc, StepScheme scheme = StepScheme::Conservative,
             int max_fixed_point = 60, double fixed_point_tol = 1e-12)
      : disc_(std::move(disc)), scheme_(scheme), stiff_(disc_->stiffness_v()),
        max_fp_(max_fixed_point), fp_tol_(fixed_point_tol) {}

  const Discretization& discretization() const noexcept { return *disc_; }
  StepScheme scheme() const noexcept { return scheme_; }
  int last_iterations() const noexcept { return last_iter_; }

  // Advances v by dt in place. `guess` optionally seeds the implicit solve.
  void advance(std::vector<cplx>& v, double dt, const std::vector<cplx>* guess = nullptr) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw StepFailure("step: dt must be positive");
    if (scheme_ == StepScheme::Strang) {
      nonlinear_phase(v, 0.5 * dt);
      linear_step(v, dt);
      nonlinear_phase(v, 0.5 * dt);
      last_iter_ = 1;
    } else {
      conservative_step(v, dt, guess);
    }
    for (const auto& z : v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw StepFailure("step: non-finite amplitude");
  }

  // v <- v exp(i tau r^-b |u|^sigma)
  void nonlinear_phase(std::vector<cplx>& v, double tau) const {
    auto rate = disc_->potential_rate_v();
    const Power half_sig(0.5 * disc_->params().sigma);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] *= std::polar(1.0, tau * rate[i] * half_sig(std::norm(v[i])));
  }

  // Crank-Nicolson for i W v_t = K v.
  void linear_step(std::vector<cplx>& v, double dt) {
    if (!linear_lu_ || linear_dt_ != dt) {
      linear_lu_.emplace(system_matrix(dt, nullptr));
      linear_dt_ = dt;
    }
    std::vector<cplx> rhs = explicit_half(v, dt, nullptr);
    linear_lu_->solve<cplx>(rhs);
    v.swap(rhs);
  }

 private:
  // W + i dt/2 (K - W V)
  BandedMatrix<cplx> system_matrix(double dt, const std::vector<double>* pot) const {
    const std::size_t n = disc_->size();
    auto wv = disc_->mass_weights_v();
    BandedMatrix<cplx> a(n, 3, 3);
    const cplx ih(0.0, 0.5 * dt);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j0 = i > 3 ? i - 3 : 0, j1 = std::min(n - 1, i + 3);
      for (std::size_t j = j0; j <= j1; ++j) a(i, j) = ih * stiff_(i, j);
      double diag = wv[i];
      cplx add = 0.0;
      if (pot) add = -ih * wv[i] * (*pot)[i];
      a(i, i) += diag + add;
    }
    return a;
  }

  // W v - i dt/2 (K v - W V v)
  std::vector<cplx> explicit_half(const std::vector<cplx>& v, double dt,
                                  const std::vector<double>* pot) const {
    const std::size_t n = v.size();
    auto wv = disc_->mass_weights_v();
    std::vector<cplx> kv(n);
    stiff_.multiply<cplx, cplx>(v, kv);
    const cplx ih(0.0, 0.5 * dt);
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx hv = kv[i];
      if (pot) hv -= wv[i] * (*pot)[i] * v[i];
      out[i] = wv[i] * v[i] - ih * hv;
    }
    return out;
  }

  void conservative_step(std::vector<cplx>& v, double dt, const std::vector<cplx>* guess) {
    const std::size_t n = v.size();
    auto wv = disc_->mass_weights_v();
    auto rate = disc_->potential_rate_v();
    const double sig = disc_->params().sigma;
    const double qe = 0.5 * sig + 1.0;
    const double pref = 2.0 / (sig + 2.0);
    const Power pw_q(qe), pw_q3(qe - 3.0);

    std::vector<double> a2(n), aq(n);
    for (std::size_t i = 0; i < n; ++i) {
      a2[i] = std::norm(v[i]);
      aq[i] = pw_q(a2[i]);
    }
    std::vector<cplx> kv(n);
    stiff_.multiply<cplx, cplx>(v, kv);

    std::vector<cplx> next = guess ? *guess : v;
    std::vector<double> pot(n);
    const cplx ih(0.0, 0.5 * dt);
    double vnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) vnorm += wv[i] * a2[i];

    for (int it = 1; it <= max_fp_; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        const double b2 = std::norm(next[i]);
        const double m = 0.5 * (a2[i] + b2), del = b2 - a2[i];
        double sec;
        if (std::abs(del) <= 1e-4 * m) {
          if (m > 0.0) {
            const double m3 = pw_q3(m);
            sec = qe * m3 * m * m + qe * (qe - 1.0) * (qe - 2.0) * m3 * del * del / 24.0;
          } else {
            sec = 0.0;
          }
        } else {
          sec = (pw_q(b2) - aq[i]) / del;
        }
        pot[i] = rate[i] * pref * sec;
      }
      std::vector<cplx> rhs(n);
      for (std::size_t i = 0; i < n; ++i)
        rhs[i] = wv[i] * v[i] - ih * (kv[i] - wv[i] * pot[i] * v[i]);
      try {
        const BandedLU<cplx> lu(system_matrix(dt, &pot));
        lu.solve<cplx>(rhs);
      } catch (const Error& e) {
        throw StepFailure(std::string("step: ") + e.what());
      }
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) diff += wv[i] * std::norm(rhs[i] - next[i]);
      next.swap(rhs);
      if (!std::isfinite(diff)) throw StepFailure("step: non-finite iterate");
      if (std::sqrt(diff / vnorm) <= fp_tol_) {
        last_iter_ = it;
        v.swap(next);
        return;
      }
    }
    throw StepFailure("step: fixed-point iteration did not converge");
  }

  std::shared_ptr<const Discretization> disc_;
  StepScheme scheme_;
  BandedMatrix<double> stiff_;
  int max_fp_;
  double fp_tol_;
  int last_iter_ = 0;
  std::optional<BandedLU<cplx>> linear_lu_;
  double linear_dt_ = 0.0;
};

inline RadialField step(const RadialField& u, const ModelParams& params, double dt,
                        StepScheme scheme = StepScheme::Conservative) {
  require_valid(params);
  auto disc = std::make_shared<const Discretization>(u.grid_ptr(), params);
  Propagator prop(disc, scheme);
  auto v = disc->to_v<cplx>(u.values());
  prop.advance(v, dt);
  return {u.grid_ptr(), disc->to_u<cplx>(v)};
}

// ---------------------------------------------------------------------------

struct EvolutionConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double blowup_factor = 10.0;
  double blowup_hmax = 1e8;
  int sample_every = 50;
  double delta = 0.0;
  StepScheme scheme = StepScheme::Conservative;
  double dt_min = 1e-9;
  double mass_drift_limit = 1e-9;  // per step, relative
  bool adapt_to_concentration = true;
  double boundary_tolerance = 1e-8;
  double boundary_band = 0.05;  // outer fraction of [0, r_max] checked
  int max_fixed_point = 60;
  double fixed_point_tol = 1e-12;
};

enum class OutcomeKind { CompletedGlobal, BlowupIndicated, StepFailure };

inline std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::CompletedGlobal: return "CompletedGlobal";
    case OutcomeKind::BlowupIndicated: return "BlowupIndicated";
    case OutcomeKind::StepFailure: return "StepFailure";
  }
  return "?";
}

struct Outcome {
  OutcomeKind kind = OutcomeKind::CompletedGlobal;
  double time = 0.0;
  std::string reason;
};

struct TraceSample {
  double t = 0.0;
  FunctionalReport report;
  double h1_norm = 0.0;  // ||grad u||_{L^2}
  std::optional<OrbitDistance> distance;
  std::optional<bool> b_member;
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  double boundary_ratio = 0.0;
  double dt = 0.0;
};

struct EvolutionTrace {
  std::vector<TraceSample> samples;
  Outcome outcome;
  std::optional<double> reference_action;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  double max_mass_drift = 0.0;
  double max_energy_drift = 0.0;
  double max_boundary_ratio = 0.0;
  bool boundary_clean = true;
  std::optional<RadialField> final_state;
};

namespace detail {

struct Monitor {
  const Discretization& disc;
  const Functionals& f;
  const EvolutionConfig& cfg;

  double hdot1(const std::vector<cplx>& v) const {
    auto wv = disc.mass_weights_v();
    auto r = disc.grid().nodes();
    double inv = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) inv += wv[i] * std::norm(v[i]) / (r[i] * r[i]);
    return std::sqrt(disc.hardy_v<cplx>(v) + disc.params().c * inv);
  }

  double mass(const std::vector<cplx>& v) const {
    auto wv = disc.mass_weights_v();
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) m += wv[i] * std::norm(v[i]);
    return m;
  }

  double boundary_ratio(const std::vector<cplx>& v) const {
    auto r = disc.grid().nodes();
    auto ur = disc.unregularizer();
    const double edge = (1.0 - cfg.boundary_band) * disc.grid().r_max();
    double all = 0.0, outer = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double a = ur[i] * std::abs(v[i]);
      all = std::max(all, a);
      if (r[i] >= edge) outer = std::max(outer, a);
    }
    return all > 0.0 ? outer / all : 0.0;
  }
};

}  // namespace detail

inline bool monitor_g_criterion(const EvolutionTrace& trace, double delta) {
  if (trace.samples.empty()) throw Error("monitor_g_criterion: empty trace");
  return std::all_of(trace.samples.begin(), trace.samples.end(),
                     [&](const TraceSample& s) { return s.report.virial_g <= -delta; });
}

inline EvolutionTrace evolve(const RadialField& u0, const ModelParams& params,
                             const EvolutionConfig& cfg,
                             const std::optional<RadialField>& reference = std::nullopt) {
  require_valid(params);
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0) || !(cfg.blowup_factor > 1.0) || cfg.sample_every < 1)
    throw Error("evolve: invalid configuration");

  auto disc = std::make_shared<const Discretization>(u0.grid_ptr(), params);
  const Functionals f(disc);
  Propagator prop(disc, cfg.scheme, cfg.max_fixed_point, cfg.fixed_point_tol);
  const detail::Monitor mon{*disc, f, cfg};

  EvolutionTrace trace;
  std::optional<double> s_ref;
  if (reference) {
    s_ref = f.report(*reference).action;
    trace.reference_action = s_ref;
  }

  std::vector<cplx> v = disc->to_v<cplx>(u0.values());
  const auto rep0 = f.report_v(v);
  const double m0 = rep0.mass, e0 = rep0.energy;
  const double e_scale = std::max(std::abs(e0), 1e-12 * rep0.h_omega);
  const double h0 = mon.hdot1(v);
  const double t0 = rep0.hardy_seminorm_sq;

  auto sample = [&](double t, double dt) {
    RadialField u(u0.grid_ptr(), disc->to_u<cplx>(v));
    TraceSample s;
    s.t = t;
    s.dt = dt;
    s.report = f.report_v(v);
    s.h1_norm = mon.hdot1(v);
    if (reference) {
      s.distance = f.distance_to_orbit(u, *reference);
      s.b_member = s.report.action < *s_ref && s.report.virial_g < 0.0;
    }
    s.mass_drift = m0 > 0.0 ? std::abs(s.report.mass - m0) / m0 : 0.0;
    s.energy_drift = std::abs(s.report.energy - e0) / e_scale;
    s.boundary_ratio = mon.boundary_ratio(v);
    trace.max_mass_drift = std::max(trace.max_mass_drift, s.mass_drift);
    trace.max_energy_drift = std::max(trace.max_energy_drift, s.energy_drift);
    trace.max_boundary_ratio = std::max(trace.max_boundary_ratio, s.boundary_ratio);
    trace.samples.push_back(std::move(s));
  };

  double t = 0.0, dt = cfg.dt, last_dt = 0.0;
  sample(0.0, dt);
  std::vector<cplx> prev;  // state one step back, for the predictor
  std::size_t since_sample = 0;
  double m_cur = m0;
  const double t_tol = 1e-12 * cfg.t_end;

  while (t < cfg.t_end - t_tol) {
    if (cfg.adapt_to_concentration && t0 > 0.0) {
      const double tc = disc->hardy_v<cplx>(v);
      while (dt * tc > 1.5 * cfg.dt * t0 && dt > cfg.dt_min) dt *= 0.5;
    }
    const double h = std::min(dt, cfg.t_end - t);
    std::vector<cplx> trial = v;
    std::vector<cplx> guess;
    const bool use_guess = !prev.empty() && h == last_dt;
    if (use_guess) {
      guess.resize(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) guess[i] = 2.0 * v[i] - prev[i];
    }
    bool ok = true;
    std::string why;
    try {
      prop.advance(trial, h, use_guess ? &guess : nullptr);
      const double m_new = mon.mass(trial);
      if (std::abs(m_new - m_cur) > cfg.mass_drift_limit * m_cur) {
        ok = false;
        why = "mass drift";
      } else {
        m_cur = m_new;
      }
    } catch (const StepFailure& e) {
      ok = false;
      why = e.what();
    }
    if (!ok) {
      ++trace.rejected_steps;
      dt *= 0.5;
      prev.clear();
      if (dt < cfg.dt_min) {
        const bool grown = mon.hdot1(v) >= 2.0 * h0;
        trace.outcome = {grown ? OutcomeKind::BlowupIndicated : OutcomeKind::StepFailure, t,
                         "step collapse (" + why + ")"};
        if (t > trace.samples.back().t) sample(t, dt);
        trace.final_state.emplace(u0.grid_ptr(), disc->to_u<cplx>(v));
        trace.boundary_clean = trace.max_boundary_ratio <= cfg.boundary_tolerance;
        return trace;
      }
      continue;
    }
    prev.swap(v);
    v.swap(trial);
    last_dt = h;
    t += h;
    ++trace.steps;
    ++since_sample;

    const double hn = mon.hdot1(v);
    if (hn >= cfg.blowup_factor * h0 || hn >= cfg.blowup_hmax) {
      sample(t, h);
      trace.outcome = {OutcomeKind::BlowupIndicated, t,
                       hn >= cfg.blowup_hmax ? "Hdot1 norm above ceiling" : "Hdot1 growth factor"};
      trace.final_state.emplace(u0.grid_ptr(), disc->to_u<cplx>(v));
      trace.boundary_clean = trace.max_boundary_ratio <= cfg.boundary_tolerance;
      return trace;
    }
    if (since_sample >= static_cast<std::size_t>(cfg.sample_every) || t >= cfg.t_end - t_tol) {
      sample(t, h);
      since_sample = 0;
    }
  }
  trace.outcome = {OutcomeKind::CompletedGlobal, t, "reached t_end"};
  trace.final_state.emplace(u0.grid_ptr(), disc->to_u<cplx>(v));
  trace.boundary_clean = trace.max_boundary_ratio <= cfg.boundary_tolerance;
  return trace;
}

}  // namespace inlsc
