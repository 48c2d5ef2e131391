#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "inlsc/errors.hpp"

namespace inlsc {

// Monotone piecewise-cubic Hermite interpolant on a uniform grid x_k = k*h,
// k = 0..m. Slopes start from 4th-order differences and go through the
// Fritsch-Carlson limiter, so monotone data stays monotone.
class MonotoneCubic {
 public:
  MonotoneCubic(double h, std::vector<double> y) : h_(h), y_(std::move(y)) {
    const std::size_t m = y_.size();
    if (m < 5) throw Error("MonotoneCubic: need at least 5 samples");
    slope_.resize(m);
    const double inv = 1.0 / (12.0 * h_);
    for (std::size_t k = 2; k + 2 < m; ++k)
      slope_[k] = (y_[k - 2] - 8.0 * y_[k - 1] + 8.0 * y_[k + 1] - y_[k + 2]) * inv;
    slope_[0] = (-25.0 * y_[0] + 48.0 * y_[1] - 36.0 * y_[2] + 16.0 * y_[3] - 3.0 * y_[4]) * inv;
    slope_[1] = (-3.0 * y_[0] - 10.0 * y_[1] + 18.0 * y_[2] - 6.0 * y_[3] + y_[4]) * inv;
    const std::size_t e = m - 1;
    slope_[e] = (25.0 * y_[e] - 48.0 * y_[e - 1] + 36.0 * y_[e - 2] - 16.0 * y_[e - 3] +
                 3.0 * y_[e - 4]) * inv;
    slope_[e - 1] = (3.0 * y_[e] + 10.0 * y_[e - 1] - 18.0 * y_[e - 2] + 6.0 * y_[e - 3] -
                     y_[e - 4]) * inv;
    limit();
  }

  double operator()(double x) const {
    const std::size_t m = y_.size();
    double t = x / h_;
    if (t <= 0.0) return y_.front();
    if (t >= static_cast<double>(m - 1)) return y_.back();
    auto k = static_cast<std::size_t>(t);
    if (k >= m - 1) k = m - 2;
    t -= static_cast<double>(k);
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[k] + h10 * h_ * slope_[k] + h01 * y_[k + 1] + h11 * h_ * slope_[k + 1];
  }

 private:
  void limit() {
    const std::size_t m = y_.size();
    std::vector<double> delta(m - 1);
    for (std::size_t k = 0; k + 1 < m; ++k) delta[k] = (y_[k + 1] - y_[k]) / h_;
    for (std::size_t k = 1; k + 1 < m; ++k)
      if (delta[k - 1] * delta[k] < 0.0) slope_[k] = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      if (delta[k] == 0.0) {
        slope_[k] = slope_[k + 1] = 0.0;
        continue;
      }
      if (slope_[k] * delta[k] < 0.0) slope_[k] = 0.0;
      if (slope_[k + 1] * delta[k] < 0.0) slope_[k + 1] = 0.0;
      const double a = slope_[k] / delta[k], b = slope_[k + 1] / delta[k];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        slope_[k] = tau * a * delta[k];
        slope_[k + 1] = tau * b * delta[k];
      }
    }
  }

  double h_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

}  // namespace inlsc
