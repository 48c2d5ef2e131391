#pragma once

// Discrete operators shared by the functionals, the ground-state solver and
// the time stepper.
//
// Near the origin finite-energy fields behave like r^gamma, gamma the Hardy
// exponent. Writing u = r^gamma v removes that singular factor exactly:
//
//   ||u||^2_{Hdot^1_c} = |S^{d-1}| * int_0^inf r^{d-1+2 gamma} |v'(r)|^2 dr
//
// for every admissible c, and v is smooth at r = 0. The integral is
// discretized with a 4th-order staggered derivative on half nodes of the
// computational grid and the midpoint rule there; the midpoint rule caps the
// overall accuracy at second order. Ghost values at the origin
// come from an even quadratic-in-s^2 extrapolation; beyond r_max v vanishes.
// The result is a positive semidefinite form v^H K v with K of bandwidth 3.
//
// T is always accumulated as a sum of squares: forming v^H K v loses about
// eight digits to cancellation on fine grids.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "inlsc/banded.hpp"
#include "inlsc/model.hpp"

namespace inlsc {

class Discretization {
 public:
  Discretization(GridPtr grid, const ModelParams& params)
      : grid_(std::move(grid)), params_(params) {
    if (!grid_) throw Error("Discretization: null grid");
    require_functional_domain(params_);
    if (grid_->dimension() != params_.d)
      throw Error("Discretization: grid dimension does not match params.d");

    const std::size_t n = grid_->size();
    const double h = grid_->spacing();
    gamma_ = hardy_exponent(params_.d, params_.c);
    const double pexp = params_.d - 1 + 2.0 * gamma_;

    auto r = grid_->nodes();
    auto w = grid_->weights();
    reg_.resize(n);
    unreg_.resize(n);
    wv_.resize(n);
    pot_w_.resize(n);
    pot_wv_.resize(n);
    rate_v_.resize(n);
    inv_sq_w_.resize(n);
    const double sig = params_.sigma, b = params_.b;
    for (std::size_t i = 0; i < n; ++i) {
      const double rg = std::pow(r[i], gamma_);
      unreg_[i] = rg;
      reg_[i] = 1.0 / rg;
      wv_[i] = w[i] * rg * rg;
      pot_w_[i] = w[i] * std::pow(r[i], -b);
      pot_wv_[i] = pot_w_[i] * std::pow(rg, sig + 2.0);
      rate_v_[i] = std::pow(r[i], -b) * std::pow(rg, sig);
      inv_sq_w_[i] = w[i] / (r[i] * r[i]);
    }

    auto rh = grid_->half_nodes();
    auto jh = grid_->half_jacobian();
    const double area = sphere_area(params_.d);
    half_w_.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) half_w_[j] = area * h * std::pow(rh[j], pexp) / jh[j];

    build_rows(n, h);
  }

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const ModelParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return reg_.size(); }
  double gamma() const noexcept { return gamma_; }

  std::span<const double> regularizer() const noexcept { return reg_; }     // r^-gamma
  std::span<const double> unregularizer() const noexcept { return unreg_; } // r^gamma
  std::span<const double> mass_weights_v() const noexcept { return wv_; }
  std::span<const double> potential_weights() const noexcept { return pot_w_; }   // w r^-b
  std::span<const double> potential_weights_v() const noexcept { return pot_wv_; }
  // r^-b |u|^sigma = rate_v * |v|^sigma
  std::span<const double> potential_rate_v() const noexcept { return rate_v_; }
  std::span<const double> inverse_square_weights() const noexcept { return inv_sq_w_; }
  std::span<const double> half_weights() const noexcept { return half_w_; }

  template <typename S>
  std::vector<S> to_v(std::span<const S> u) const {
    std::vector<S> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u[i] * reg_[i];
    return v;
  }
  template <typename S>
  std::vector<S> to_u(std::span<const S> v) const {
    std::vector<S> u(v.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = v[i] * unreg_[i];
    return u;
  }

  // Staggered derivative, n+1 half-node values.
  template <typename S>
  void derivative(std::span<const S> v, std::span<S> dv) const {
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const Row& row = rows_[j];
      S acc{};
      for (int k = 0; k < row.len; ++k) acc += row.coef[k] * v[row.col0 + k];
      dv[j] = acc;
    }
  }

  template <typename S>
  void derivative_transpose(std::span<const S> y, std::span<S> out) const {
    for (auto& z : out) z = S{};
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const Row& row = rows_[j];
      for (int k = 0; k < row.len; ++k) out[row.col0 + k] += row.coef[k] * y[j];
    }
  }

  template <typename S>
  double hardy_v(std::span<const S> v) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const Row& row = rows_[j];
      S dv{};
      for (int k = 0; k < row.len; ++k) dv += row.coef[k] * v[row.col0 + k];
      acc += half_w_[j] * std::norm(dv);
    }
    return acc;
  }

  // Sum_j a_j (D v1)_j conj((D v2)_j)
  cplx hardy_bilinear_v(std::span<const cplx> v1, std::span<const cplx> v2) const {
    cplx acc{};
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const Row& row = rows_[j];
      cplx d1{}, d2{};
      for (int k = 0; k < row.len; ++k) {
        d1 += row.coef[k] * v1[row.col0 + k];
        d2 += row.coef[k] * v2[row.col0 + k];
      }
      acc += half_w_[j] * d1 * std::conj(d2);
    }
    return acc;
  }

  // out = K v
  template <typename S>
  void apply_hardy_v(std::span<const S> v, std::span<S> out) const {
    std::vector<S> dv(rows_.size());
    derivative<S>(v, dv);
    for (std::size_t j = 0; j < dv.size(); ++j) dv[j] *= half_w_[j];
    derivative_transpose<S>(dv, out);
  }

  BandedMatrix<double> stiffness_v() const {
    const std::size_t n = size();
    BandedMatrix<double> k(n, 3, 3);
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const Row& row = rows_[j];
      for (int a = 0; a < row.len; ++a)
        for (int b = 0; b < row.len; ++b)
          k(row.col0 + a, row.col0 + b) += half_w_[j] * row.coef[a] * row.coef[b];
    }
    return k;
  }

 private:
  struct Row {
    std::size_t col0 = 0;
    std::array<double, 4> coef{};
    int len = 0;
  };

  void build_rows(std::size_t n, double h) {
    // Half node j+1/2 uses nodes j-1, j, j+1, j+2 (1-based, node i at s = i h).
    static constexpr double kStencil[4] = {1.0, -27.0, 27.0, -1.0};
    static constexpr double kOrigin[3] = {1.5, -0.6, 0.1};  // v(0) from v_1, v_2, v_3
    rows_.assign(n + 1, Row{});
    const double inv = 1.0 / (24.0 * h);
    for (std::size_t j = 0; j <= n; ++j) {
      std::array<double, 8> acc{};  // dense over 1-based nodes j-2 .. j+5, shifted
      const long base = static_cast<long>(j) - 2;
      auto add = [&](long node, double c) {
        if (node < 0) node = -node;
        if (node == 0) {
          for (int k = 0; k < 3; ++k) acc[static_cast<std::size_t>(1 + k - base)] += c * kOrigin[k];
          return;
        }
        if (node > static_cast<long>(n)) return;
        acc[static_cast<std::size_t>(node - base)] += c;
      };
      for (int k = 0; k < 4; ++k) add(static_cast<long>(j) - 1 + k, kStencil[k] * inv);

      long first = -1, last = -1;
      for (long k = 0; k < 8; ++k)
        if (acc[k] != 0.0) {
          if (first < 0) first = k;
          last = k;
        }
      Row row;
      row.col0 = static_cast<std::size_t>(first + base - 1);
      row.len = static_cast<int>(last - first + 1);
      for (int k = 0; k < row.len; ++k) row.coef[k] = acc[static_cast<std::size_t>(first + k)];
      rows_[j] = row;
    }
  }

  GridPtr grid_;
  ModelParams params_;
  double gamma_ = 0.0;
  std::vector<double> reg_, unreg_, wv_, pot_w_, pot_wv_, rate_v_, inv_sq_w_, half_w_;
  std::vector<Row> rows_;
};

}  // namespace inlsc
