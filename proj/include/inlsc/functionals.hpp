#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "inlsc/discretization.hpp"
#include "inlsc/interpolation.hpp"
#include "inlsc/model.hpp"
#include "inlsc/power.hpp"

namespace inlsc {

struct FunctionalReport {
  double mass = 0.0;
  double hardy_seminorm_sq = 0.0;  // ||u||^2 in Hdot^1_c
  double h_omega = 0.0;
  double potential = 0.0;  // int |x|^-b |u|^{sigma+2}
  double energy = 0.0;
  double action = 0.0;
  double nehari = 0.0;
  double virial_g = 0.0;
};

// Everything else is algebra on the three quadratures T, M, P.
inline FunctionalReport assemble_report(double mass, double hardy, double potential,
                                        const ModelParams& p) {
  FunctionalReport r;
  r.mass = mass;
  r.hardy_seminorm_sq = hardy;
  r.potential = potential;
  r.h_omega = hardy + p.omega * mass;
  r.energy = 0.5 * hardy - potential / (p.sigma + 2.0);
  r.action = r.energy + 0.5 * p.omega * mass;
  r.nehari = r.h_omega - potential;
  r.virial_g = hardy - virial_coefficient(p) * potential;
  return r;
}

struct OrbitDistance {
  double absolute = 0.0;  // inf_theta ||u - e^{i theta} phi||_{H^1}
  double relative = 0.0;  // absolute / ||phi||_{H^1}
  double phase = 0.0;     // minimizing theta
};

class Functionals {
 public:
  Functionals(GridPtr grid, const ModelParams& params)
      : disc_(std::make_shared<const Discretization>(std::move(grid), params)) {}
  explicit Functionals(std::shared_ptr<const Discretization> disc) : disc_(std::move(disc)) {}

  const Discretization& discretization() const noexcept { return *disc_; }
  const std::shared_ptr<const Discretization>& discretization_ptr() const noexcept { return disc_; }
  const ModelParams& params() const noexcept { return disc_->params(); }

  FunctionalReport report(const RadialField& u) const {
    check_grid(u);
    return report_v(disc_->to_v<cplx>(u.values()));
  }

  // Same, from the regularized profile v = r^-gamma u.
  FunctionalReport report_v(std::span<const cplx> v) const {
    const double t = disc_->hardy_v<cplx>(v);
    auto wv = disc_->mass_weights_v();
    auto q = disc_->potential_weights_v();
    const Power pw(0.5 * (disc_->params().sigma + 2.0));
    double m = 0.0, pot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double a2 = std::norm(v[i]);
      m += wv[i] * a2;
      pot += q[i] * pw(a2);
    }
    if (!std::isfinite(t) || !std::isfinite(m) || !std::isfinite(pot))
      throw NonFiniteField("report: functional overflowed");
    return assemble_report(m, t, pot, disc_->params());
  }

  double hardy(const RadialField& u) const {
    check_grid(u);
    return disc_->hardy_v<cplx>(disc_->to_v<cplx>(u.values()));
  }

  double mass(const RadialField& u) const {
    auto w = disc_->grid().weights();
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m += w[i] * std::norm(u[i]);
    return m;
  }

  // L2 gradient of S_omega: -Δu - c r^-2 u + omega u - r^-b |u|^sigma u.
  RadialField gradient(const RadialField& u) const {
    check_grid(u);
    const std::size_t n = u.size();
    auto v = disc_->to_v<cplx>(u.values());
    std::vector<cplx> kv(n);
    disc_->apply_hardy_v<cplx>(v, kv);
    auto w = disc_->grid().weights();
    auto reg = disc_->regularizer();
    auto r = disc_->grid().nodes();
    const auto& p = disc_->params();
    std::vector<cplx> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double rate = std::pow(r[i], -p.b) * std::pow(std::abs(u[i]), p.sigma);
      g[i] = reg[i] * kv[i] / w[i] + (p.omega - rate) * u[i];
    }
    return {u.grid_ptr(), std::move(g)};
  }

  double l2_norm(const RadialField& u) const { return std::sqrt(mass(u)); }

  // ||grad u||^2 = ||u||^2_{Hdot^1_c} + c ||u/r||^2
  double gradient_norm_sq(const RadialField& u) const {
    return hardy(u) + disc_->params().c * inverse_square(u);
  }
  double hdot1_norm(const RadialField& u) const { return std::sqrt(gradient_norm_sq(u)); }

  cplx h1_inner(const RadialField& a, const RadialField& b) const {
    check_grid(a);
    check_grid(b);
    auto va = disc_->to_v<cplx>(a.values());
    auto vb = disc_->to_v<cplx>(b.values());
    cplx acc = disc_->hardy_bilinear_v(va, vb);
    auto w = disc_->grid().weights();
    auto isq = disc_->inverse_square_weights();
    const double c = disc_->params().c;
    for (std::size_t i = 0; i < a.size(); ++i)
      acc += (c * isq[i] + w[i]) * a[i] * std::conj(b[i]);
    return acc;
  }

  double h1_norm(const RadialField& u) const { return std::sqrt(std::max(0.0, h1_inner(u, u).real())); }

  OrbitDistance distance_to_orbit(const RadialField& u, const RadialField& phi) const {
    const cplx ip = h1_inner(u, phi);
    OrbitDistance d;
    d.phase = std::abs(ip) > 0.0 ? std::arg(ip) : 0.0;
    d.absolute = h1_norm(u.axpy(-std::polar(1.0, d.phase), phi));
    const double pn = h1_norm(phi);
    d.relative = pn > 0.0 ? d.absolute / pn : std::numeric_limits<double>::infinity();
    return d;
  }

  double gn_quotient(const RadialField& u) const {
    const auto rep = report(u);
    if (!(rep.hardy_seminorm_sq > 0.0)) throw DegenerateField("gn_quotient: zero Hardy seminorm");
    const auto& p = disc_->params();
    const double et = 0.25 * (p.d * p.sigma + 2.0 * p.b);
    const double em = 0.25 * (4.0 - 2.0 * p.b - p.sigma * (p.d - 2));
    return rep.potential / (std::pow(rep.hardy_seminorm_sq, et) * std::pow(rep.mass, em));
  }

 private:
  void check_grid(const RadialField& u) const {
    if (u.size() != disc_->size()) throw Error("field does not live on this discretization");
  }

  double inverse_square(const RadialField& u) const {
    auto isq = disc_->inverse_square_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += isq[i] * std::norm(u[i]);
    return acc;
  }

  std::shared_ptr<const Discretization> disc_;
};

inline FunctionalReport report(const RadialField& u, const ModelParams& params) {
  return Functionals(u.grid_ptr(), params).report(u);
}

inline RadialField gradient_action(const RadialField& u, const ModelParams& params) {
  return Functionals(u.grid_ptr(), params).gradient(u);
}

inline double gn_quotient(const RadialField& u, const ModelParams& params) {
  return Functionals(u.grid_ptr(), params).gn_quotient(u);
}

// ---------------------------------------------------------------------------
// Dilations.

inline constexpr double kSupportLossTolerance = 1e-8;

// Continuous reconstruction of a grid field: r^-gamma u is interpolated in the
// computational coordinate, so fields behaving like r^gamma at the origin keep
// full accuracy. Zero beyond r_max.
class FieldInterpolant {
 public:
  FieldInterpolant(const RadialField& u, double origin_exponent)
      : grid_(u.grid_ptr()), gamma_(origin_exponent), re_(build(u, origin_exponent, true)),
        im_(build(u, origin_exponent, false)) {}

  cplx operator()(double r) const {
    if (r > grid_->r_max()) return {};
    const double s = grid_->inverse_map(r);
    return std::pow(r, gamma_) * cplx(re_(s), im_(s));
  }

 private:
  MonotoneCubic build(const RadialField& u, double gam, bool real) const {
    const RadialGrid& g = *grid_;
    const std::size_t n = g.size();
    auto r = g.nodes();
    std::vector<double> y(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx v = u[i] * std::pow(r[i], -gam);
      y[i + 1] = real ? v.real() : v.imag();
    }
    y[0] = 1.5 * y[1] - 0.6 * y[2] + 0.1 * y[3];
    return MonotoneCubic(g.spacing(), std::move(y));
  }

  GridPtr grid_;
  double gamma_;
  MonotoneCubic re_, im_;
};

// lambda^{d/2} u(lambda r) on the same grid.
inline RadialField dilate(const RadialField& u, double lambda, double origin_exponent = 0.0) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("dilate: lambda must be positive");
  const RadialGrid& g = u.grid();
  const std::size_t n = g.size();
  auto r = g.nodes();
  auto w = g.weights();

  if (lambda < 1.0) {
    double total = 0.0, tail = 0.0;
    const double edge = lambda * g.r_max();
    for (std::size_t i = 0; i < n; ++i) {
      const double m = w[i] * std::norm(u[i]);
      total += m;
      if (r[i] > edge) tail += m;
    }
    if (total > 0.0 && tail > kSupportLossTolerance * total)
      throw SupportLoss("dilate: mass leaves the domain");
  }
  if (lambda == 1.0) return u;

  const FieldInterpolant f(u, origin_exponent);
  const double amp = std::pow(lambda, 0.5 * g.dimension());
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = amp * f(lambda * r[i]);
  return {u.grid_ptr(), std::move(out)};
}

// u sampled on another grid of the same dimension.
inline RadialField resample(const RadialField& u, const GridPtr& target, double origin_exponent) {
  if (target->dimension() != u.grid().dimension()) throw Error("resample: dimension mismatch");
  const FieldInterpolant f(u, origin_exponent);
  return RadialField::from_function(target, [&](double r) { return f(r); });
}

inline RadialField dilate(const RadialField& u, double lambda, const ModelParams& params) {
  return dilate(u, lambda, hardy_exponent(params.d, params.c));
}

inline RadialField scale_amplitude_dilate(const RadialField& u, double mu, double lambda,
                                          double origin_exponent = 0.0) {
  if (!(mu > 0.0)) throw Error("scale_amplitude_dilate: mu must be positive");
  return dilate(u, lambda, origin_exponent).scaled(mu);
}

inline RadialField scale_amplitude_dilate(const RadialField& u, double mu, double lambda,
                                          const ModelParams& params) {
  return scale_amplitude_dilate(u, mu, lambda, hardy_exponent(params.d, params.c));
}

struct DilationSample {
  double lambda;
  double action;
  double nehari;
  double virial_g;
};

// S, K, G of u_lambda in closed form from T, M, P of u.
inline DilationSample dilation_sample(const FunctionalReport& base, const ModelParams& p,
                                      double lambda) {
  const double k = dilation_exponent(p);
  const double l2 = lambda * lambda, lk = std::pow(lambda, k);
  const double t = base.hardy_seminorm_sq, m = base.mass, pot = base.potential;
  DilationSample s;
  s.lambda = lambda;
  s.action = 0.5 * l2 * t + 0.5 * p.omega * m - lk * pot / (p.sigma + 2.0);
  s.nehari = l2 * t + p.omega * m - lk * pot;
  // lambda * d/dlambda of the action
  s.virial_g = l2 * t - k / (p.sigma + 2.0) * lk * pot;
  return s;
}

inline std::vector<DilationSample> action_along_dilation(const RadialField& u,
                                                         const ModelParams& params,
                                                         std::span<const double> lambdas) {
  const auto base = report(u, params);
  std::vector<DilationSample> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(dilation_sample(base, params, l));
  return out;
}

// Unique critical point of lambda -> S_omega(u_lambda); NaN when the exponent
// of P equals 2 (mass-critical), where the map has no isolated critical point.
inline double dilation_stationary_scale(const FunctionalReport& base, const ModelParams& p) {
  const double k = dilation_exponent(p);
  if (std::abs(k - 2.0) < 1e-12 || !(base.potential > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  return std::pow(base.hardy_seminorm_sq / (virial_coefficient(p) * base.potential), 1.0 / (k - 2.0));
}

// ---------------------------------------------------------------------------
// Localized virial weight phi_R(x) = R^2 theta(|x|/R).
//
// theta = r^2 on [0,1] and 0 beyond 2. On [1,2] it is (2-r)^2: no C^1 bridge
// can keep theta'' <= 2, since integrating that bound back from r = 2 forces
// theta(1) <= 1 with equality only for (2-r)^2. theta'' = 2 away from r = 1,
// where theta' jumps down (a negative point mass in theta'').
class CutoffProfile {
 public:
  explicit CutoffProfile(double radius) : R_(radius) {
    if (!(radius > 1.0)) throw Error("CutoffProfile: R must exceed 1");
  }
  double R() const noexcept { return R_; }

  static double theta(double r) {
    if (r <= 1.0) return r * r;
    if (r < 2.0) return (2.0 - r) * (2.0 - r);
    return 0.0;
  }
  static double theta_prime(double r) {
    if (r < 1.0) return 2.0 * r;
    if (r < 2.0) return -2.0 * (2.0 - r);
    return 0.0;
  }
  // Absolutely continuous part of theta''.
  static double theta_second(double r) { return r < 2.0 ? 2.0 : 0.0; }

  double phi(double x) const { return R_ * R_ * theta(x / R_); }

 private:
  double R_;
};

inline double localized_virial(const RadialField& u, const CutoffProfile& cutoff) {
  const RadialGrid& g = u.grid();
  auto r = g.nodes();
  auto w = g.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += w[i] * cutoff.phi(r[i]) * std::norm(u[i]);
  return acc;
}

}  // namespace inlsc
