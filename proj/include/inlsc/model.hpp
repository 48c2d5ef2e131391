#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inlsc/errors.hpp"

namespace inlsc {

using cplx = std::complex<double>;

struct ModelParams {
  int d = 3;
  double b = 0.5;
  double sigma = 1.0;
  double c = 0.1;
  double omega = 1.0;
};

inline double critical_coupling(int d) {
  const double h = 0.5 * (d - 2);
  return h * h;
}

inline double energy_critical_power(const ModelParams& p) {
  return (4.0 - 2.0 * p.b) / (p.d - 2);
}

inline double mass_critical_power(const ModelParams& p) {
  return (4.0 - 2.0 * p.b) / p.d;
}

// Exponent k with P(u_lambda) = lambda^k P(u) under the mass-preserving dilation.
inline double dilation_exponent(const ModelParams& p) {
  return 0.5 * (p.d * p.sigma + 2.0 * p.b);
}

// k' = (d sigma + 2b) / (2(sigma + 2)), the potential coefficient in G.
inline double virial_coefficient(const ModelParams& p) {
  return dilation_exponent(p) / (p.sigma + 2.0);
}

inline std::optional<ValidationError> validate(const ModelParams& p) {
  using std::to_string;
  if (p.d < 3) return ValidationError("d", "d must be at least 3, got " + to_string(p.d));
  if (!std::isfinite(p.b) || !(p.b > 0.0) || !(p.b < 2.0))
    return ValidationError("b", "b must lie in (0, 2), got " + to_string(p.b));
  const double sig_max = energy_critical_power(p);
  if (!std::isfinite(p.sigma) || !(p.sigma > 0.0) || !(p.sigma < sig_max))
    return ValidationError("sigma", "sigma must lie in (0, " + to_string(sig_max) + "), got " +
                                        to_string(p.sigma));
  const double cd = critical_coupling(p.d);
  if (!std::isfinite(p.c) || p.c == 0.0 || !(p.c < cd))
    return ValidationError("c", "c must be nonzero and below c(d) = " + to_string(cd) +
                                    ", got " + to_string(p.c));
  if (!std::isfinite(p.omega) || !(p.omega > 0.0))
    return ValidationError("omega", "omega must be positive, got " + to_string(p.omega));
  return std::nullopt;
}

inline void require_valid(const ModelParams& p) {
  if (auto err = validate(p)) throw *err;
}

// Functionals only need the Hardy form to be coercive, so c = 0 is allowed here.
inline void require_functional_domain(const ModelParams& p) {
  if (p.d < 3) throw ValidationError("d", "d must be at least 3");
  if (!(p.c < critical_coupling(p.d))) throw ValidationError("c", "c must be below c(d)");
  if (!(p.sigma > 0.0)) throw ValidationError("sigma", "sigma must be positive");
  if (!(p.b >= 0.0) || !(p.b < 2.0)) throw ValidationError("b", "b must lie in [0, 2)");
}

enum class RegimeTag { MassSubcritical, MassCritical, Intercritical };

struct Regime {
  RegimeTag tag;
  double s_c;
};

inline constexpr double kMassCriticalTolerance = 1e-12;

inline Regime classify(const ModelParams& p) {
  const double sc = 0.5 * p.d - (2.0 - p.b) / p.sigma;
  if (std::abs(sc) <= kMassCriticalTolerance) return {RegimeTag::MassCritical, sc};
  return {sc < 0.0 ? RegimeTag::MassSubcritical : RegimeTag::Intercritical, sc};
}

inline std::string_view to_string(RegimeTag t) {
  switch (t) {
    case RegimeTag::MassSubcritical: return "MassSubcritical";
    case RegimeTag::MassCritical: return "MassCritical";
    case RegimeTag::Intercritical: return "Intercritical";
  }
  return "?";
}

// Leading power r^gamma of finite-energy solutions of -Δu - c|x|^-2 u = 0 at the origin.
inline double hardy_exponent(int d, double c) {
  const double h = 0.5 * (d - 2);
  return -h + std::sqrt(h * h - c);
}

// |S^{d-1}|
inline double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// ---------------------------------------------------------------------------
// Grid.
//
// Nodes sit on a uniform computational grid s_i = i*h, i = 1..n, mapped by
// r = g(s). The graded map g(s) = s^2/(s+1) gives density ~ r^{-1/2} near the
// origin and unit slope far out. Node weights integrate over R^d; half-node
// data (s_{j+1/2}, j = 0..n) is kept for the staggered Hardy form.

enum class GridScheme { Uniform, Graded };

inline std::string_view to_string(GridScheme s) {
  return s == GridScheme::Uniform ? "uniform" : "graded";
}

inline std::optional<GridScheme> parse_grid_scheme(std::string_view s) {
  if (s == "uniform") return GridScheme::Uniform;
  if (s == "graded") return GridScheme::Graded;
  return std::nullopt;
}

class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n, GridScheme scheme, int d = 3)
      : r_max_(r_max), n_(n), scheme_(scheme), d_(d) {
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw Error("make_grid: r_max must be positive");
    if (n < 16) throw Error("make_grid: n must be at least 16");
    if (d < 1) throw Error("make_grid: dimension must be positive");
    s_max_ = inverse_map(r_max);
    h_ = s_max_ / static_cast<double>(n);

    const double area = sphere_area(d);
    nodes_.resize(n);
    jac_.resize(n);
    weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = h_ * static_cast<double>(i + 1);
      nodes_[i] = i + 1 == n ? r_max : map(s);
      jac_[i] = map_derivative(s);
      weights_[i] = area * h_ * std::pow(nodes_[i], d - 1) * jac_[i];
    }
    // Gregory end correction (4th order) at s_max; the origin end needs none
    // because the integrand vanishes there with its odd derivatives.
    static constexpr double kEnd[4] = {49.0 / 48.0, 43.0 / 48.0, 59.0 / 48.0, 17.0 / 48.0};
    for (int k = 0; k < 4; ++k) weights_[n - 4 + k] *= kEnd[k];

    half_nodes_.resize(n + 1);
    half_jac_.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const double s = h_ * (static_cast<double>(j) + 0.5);
      half_nodes_[j] = map(s);
      half_jac_[j] = map_derivative(s);
    }
  }

  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return n_; }
  GridScheme scheme() const noexcept { return scheme_; }
  int dimension() const noexcept { return d_; }
  double spacing() const noexcept { return h_; }  // in s
  double s_max() const noexcept { return s_max_; }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> jacobian() const noexcept { return jac_; }
  std::span<const double> half_nodes() const noexcept { return half_nodes_; }
  std::span<const double> half_jacobian() const noexcept { return half_jac_; }

  double map(double s) const {
    return scheme_ == GridScheme::Uniform ? s : s * s / (s + 1.0);
  }
  double map_derivative(double s) const {
    if (scheme_ == GridScheme::Uniform) return 1.0;
    const double q = s + 1.0;
    return s * (s + 2.0) / (q * q);
  }
  double inverse_map(double r) const {
    return scheme_ == GridScheme::Uniform ? r : 0.5 * (r + std::sqrt(r * r + 4.0 * r));
  }

  // Quadrature of f(|x|) over the ball of radius r_max.
  double integrate(const std::function<double(double)>& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) acc += weights_[i] * f(nodes_[i]);
    return acc;
  }

 private:
  double r_max_;
  std::size_t n_;
  GridScheme scheme_;
  int d_;
  double s_max_ = 0.0;
  double h_ = 0.0;
  std::vector<double> nodes_, jac_, weights_;
  std::vector<double> half_nodes_, half_jac_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(double r_max, std::size_t n, GridScheme scheme = GridScheme::Graded,
                         int d = 3) {
  return std::make_shared<const RadialGrid>(r_max, n, scheme, d);
}

// ---------------------------------------------------------------------------

class RadialField {
 public:
  RadialField(GridPtr grid, std::vector<cplx> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw Error("RadialField: null grid");
    if (values_.size() != grid_->size()) throw Error("RadialField: length does not match grid");
    for (const auto& z : values_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NonFiniteField("RadialField: non-finite amplitude");
  }

  static RadialField zero(GridPtr grid) {
    const std::size_t n = grid->size();
    return {std::move(grid), std::vector<cplx>(n)};
  }

  template <typename F>
  static RadialField from_function(GridPtr grid, F&& f) {
    std::vector<cplx> v(grid->size());
    auto r = grid->nodes();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(f(r[i]));
    return {std::move(grid), std::move(v)};
  }

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const RadialGrid& grid() const noexcept { return *grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  cplx operator[](std::size_t i) const { return values_[i]; }

  bool is_real(double tol = 0.0) const {
    for (const auto& z : values_)
      if (std::abs(z.imag()) > tol) return false;
    return true;
  }

  RadialField scaled(cplx a) const {
    auto v = values_;
    for (auto& z : v) z *= a;
    return {grid_, std::move(v)};
  }

  // this + a*other
  RadialField axpy(cplx a, const RadialField& other) const {
    if (other.size() != size()) throw Error("RadialField: size mismatch");
    auto v = values_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * other.values_[i];
    return {grid_, std::move(v)};
  }

  RadialField conj() const {
    auto v = values_;
    for (auto& z : v) z = std::conj(z);
    return {grid_, std::move(v)};
  }

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

}  // namespace inlsc
