#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "inlsc/errors.hpp"

namespace inlsc {

// Square band matrix with kl sub- and ku super-diagonals, row-major band storage.
template <typename T>
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), width_(kl + ku + 1), data_(n * (kl + ku + 1), T{}) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const noexcept {
    return j + kl_ >= i && j <= i + ku_;
  }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * width_ + (j + kl_ - i)]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * width_ + (j + kl_ - i)];
  }
  T at(std::size_t i, std::size_t j) const { return in_band(i, j) ? (*this)(i, j) : T{}; }

  template <typename U, typename V>
  void multiply(std::span<const U> x, std::span<V> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i > kl_ ? i - kl_ : 0;
      const std::size_t j1 = std::min(n_ - 1, i + ku_);
      V acc{};
      for (std::size_t j = j0; j <= j1; ++j) acc += (*this)(i, j) * x[j];
      y[i] = acc;
    }
  }

 private:
  std::size_t n_, kl_, ku_, width_;
  std::vector<T> data_;
};

// LU without pivoting. The systems solved here are diagonally dominant in the
// relevant sense (SPD, or W + i*dt*Hermitian), so pivoting is not needed.
template <typename T>
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix<T> a) : lu_(std::move(a)) {
    const std::size_t n = lu_.size(), kl = lu_.lower(), ku = lu_.upper();
    // Pivots are judged against their own row: the weights span many decades
    // across a graded grid.
    std::vector<double> row_scale(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j0 = i > kl ? i - kl : 0, j1 = std::min(n - 1, i + ku);
      for (std::size_t j = j0; j <= j1; ++j) row_scale[i] = std::max(row_scale[i], std::abs(lu_(i, j)));
    }
    for (std::size_t k = 0; k < n; ++k) {
      const T piv = lu_(k, k);
      if (!(std::abs(piv) > 1e-300 + 1e-13 * row_scale[k]) || !std::isfinite(std::abs(piv)))
        throw Error("banded LU: zero or non-finite pivot");
      const std::size_t i1 = std::min(n - 1, k + kl);
      const std::size_t j1 = std::min(n - 1, k + ku);
      for (std::size_t i = k + 1; i <= i1; ++i) {
        const T l = lu_(i, k) / piv;
        lu_(i, k) = l;
        for (std::size_t j = k + 1; j <= j1; ++j) lu_(i, j) -= l * lu_(k, j);
      }
    }
  }

  template <typename U>
  void solve(std::span<U> x) const {
    const std::size_t n = lu_.size(), kl = lu_.lower(), ku = lu_.upper();
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t j0 = i > kl ? i - kl : 0;
      U acc = x[i];
      for (std::size_t j = j0; j < i; ++j) acc -= lu_(i, j) * x[j];
      x[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      const std::size_t j1 = std::min(n - 1, ii + ku);
      U acc = x[ii];
      for (std::size_t j = ii + 1; j <= j1; ++j) acc -= lu_(ii, j) * x[j];
      x[ii] = acc / lu_(ii, ii);
    }
  }

 private:
  BandedMatrix<T> lu_;
};

}  // namespace inlsc
