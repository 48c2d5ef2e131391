#pragma once

// Synthetic fields: default initial guess, GN trial family, stability
// perturbations. Shapes are built for the profile v = r^-gamma u and then
// multiplied by r^gamma, so they carry the same origin behavior as solutions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "inlsc/functionals.hpp"
#include "inlsc/model.hpp"

namespace inlsc {

// Uniform double in [0,1) from the top 53 bits; does not depend on the
// standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 eng_;
};

inline RadialField gaussian(const GridPtr& grid, double width = 1.0, double amplitude = 1.0) {
  return RadialField::from_function(grid, [&](double r) {
    const double x = r / width;
    return amplitude * std::exp(-0.5 * x * x);
  });
}

// r^gamma * (1 + a1 x + a2 x^2) * exp(-x^2/2), x = r/width
inline RadialField regular_gaussian_poly(const GridPtr& grid, double gamma, double width,
                                         double a1, double a2, double amplitude = 1.0) {
  return RadialField::from_function(grid, [&](double r) {
    const double x = r / width;
    return amplitude * std::pow(r, gamma) * (1.0 + a1 * x + a2 * x * x) * std::exp(-0.5 * x * x);
  });
}

// Sum of 8 complex Gaussian bumps at seeded radii and widths, unit H^1 norm.
inline RadialField perturbation_direction(const Functionals& f, std::uint64_t seed,
                                          int bumps = 8) {
  const auto& grid = f.discretization().grid_ptr();
  const double gam = f.discretization().gamma();
  Rng rng(seed);
  struct Bump {
    double center, width;
    cplx amp;
  };
  std::vector<Bump> bs;
  for (int k = 0; k < bumps; ++k) {
    Bump b;
    b.center = rng.uniform(0.0, 5.0);
    b.width = rng.uniform(0.4, 1.5);
    b.amp = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    bs.push_back(b);
  }
  auto xi = RadialField::from_function(grid, [&](double r) {
    cplx acc{};
    for (const auto& b : bs) {
      const double x = (r - b.center) / b.width;
      acc += b.amp * std::exp(-0.5 * x * x);
    }
    return acc * std::pow(r, gam);
  });
  const double nrm = f.h1_norm(xi);
  if (!(nrm > 0.0)) throw DegenerateField("perturbation_direction: zero field");
  return xi.scaled(1.0 / nrm);
}

// r^gamma (1 + a1 x + a2 x^2) exp(-x^2/2) e^{i k x^2}, x = r/width, in closed
// form so that dilations can be sampled exactly.
struct SmoothProfile {
  double gamma = 0.0, width = 1.0, a1 = 0.0, a2 = 0.0, chirp = 0.0;
  cplx amp{1.0, 0.0};

  cplx operator()(double r) const {
    const double x = r / width;
    return amp * std::pow(r, gamma) * (1.0 + a1 * x + a2 * x * x) * std::exp(-0.5 * x * x) *
           std::polar(1.0, chirp * x * x);
  }

  // lambda^{d/2} f(lambda r)
  RadialField sample(const GridPtr& grid, double lambda = 1.0) const {
    const double amp_l = std::pow(lambda, 0.5 * grid->dimension());
    return RadialField::from_function(grid, [&](double r) { return amp_l * (*this)(lambda * r); });
  }
};

inline SmoothProfile random_profile(double gamma, Rng& rng) {
  SmoothProfile p;
  p.gamma = gamma;
  p.width = rng.uniform(0.7, 2.5);
  p.a1 = rng.uniform(-1.0, 1.0);
  p.a2 = rng.uniform(-0.5, 0.5);
  p.chirp = rng.uniform(0.0, 2.0);
  p.amp = cplx(rng.uniform(0.2, 2.0), rng.uniform(-1.0, 1.0));
  return p;
}

// Random smooth complex field for identity and gradient checks.
inline RadialField random_smooth_field(const GridPtr& grid, double gamma, Rng& rng) {
  return random_profile(gamma, rng).sample(grid);
}

// Seeded Gaussian x polynomial trial family for the GN quotient.
inline std::vector<SmoothProfile> gn_trial_profiles(const ModelParams& params, int count,
                                                    std::uint64_t seed) {
  const double gam = hardy_exponent(params.d, params.c);
  Rng rng(seed);
  std::vector<SmoothProfile> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    SmoothProfile p;
    p.gamma = gam;
    p.width = rng.uniform(0.4, 3.0);
    p.a1 = rng.uniform(-0.8, 1.5);
    p.a2 = rng.uniform(-0.3, 1.0);
    out.push_back(p);
  }
  return out;
}

inline std::vector<RadialField> gn_trial_fields(const GridPtr& grid, const ModelParams& params,
                                                int count, std::uint64_t seed) {
  std::vector<RadialField> out;
  for (const auto& p : gn_trial_profiles(params, count, seed)) out.push_back(p.sample(grid));
  return out;
}

}  // namespace inlsc
