#pragma once

#include <cmath>

namespace inlsc {

// x^e for x >= 0 with e fixed. Exponents that are multiples of 1/4 (every
// sigma used in practice) go through two square roots and a few products,
// several times faster than std::pow.
class Power {
 public:
  explicit Power(double e) : e_(e) {
    const double k = 4.0 * e;
    if (std::abs(k - std::round(k)) < 1e-14 && std::abs(k) <= 32.0) k_ = static_cast<int>(std::round(k));
    else quarter_ = false;
  }

  double operator()(double x) const {
    if (!quarter_) return std::pow(x, e_);
    if (k_ == 0) return 1.0;
    const double q = std::sqrt(std::sqrt(x));
    int k = k_ < 0 ? -k_ : k_;
    double acc = 1.0, base = q;
    while (k) {
      if (k & 1) acc *= base;
      base *= base;
      k >>= 1;
    }
    return k_ < 0 ? 1.0 / acc : acc;
  }

 private:
  double e_;
  int k_ = 0;
  bool quarter_ = true;
};

}  // namespace inlsc
