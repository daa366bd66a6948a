#pragma once

// Shape-preserving piecewise cubic Hermite interpolation.
//
// Node slopes come from the derivative of the local 5-point Lagrange
// polynomial (fourth order on smooth data) and are then passed through
// Hyman's filter: where the data is locally monotone the slope is clamped so
// the cubic stays monotone; at local extrema it is left alone, which keeps
// the full order there.

#include <subjtime/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace subjtime {

class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("MonotoneCubic: need >= 2 nodes and matching lengths");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i + 1] > x_[i])) throw DomainError("MonotoneCubic: abscissae must be strictly increasing");
    for (double v : y_)
      if (!std::isfinite(v)) throw DomainError("MonotoneCubic: non-finite ordinate");
    build_slopes();
  }

  std::size_t size() const { return x_.size(); }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return d_; }

  bool contains(double x, double slack = 0.0) const {
    return x >= x_.front() - slack && x <= x_.back() + slack;
  }

  double operator()(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
           (t3 - t2) * h * d_[i + 1];
  }

  double derivative(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    return (6 * t2 - 6 * t) / h * y_[i] + (3 * t2 - 4 * t + 1) * d_[i] + (-6 * t2 + 6 * t) / h * y_[i + 1] +
           (3 * t2 - 2 * t) * d_[i + 1];
  }

  /// Exact integral of the interpolant over the full node span.
  double integral() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double h = x_[i + 1] - x_[i];
      acc += 0.5 * h * (y_[i] + y_[i + 1]) + h * h * (d_[i] - d_[i + 1]) / 12.0;
    }
    return acc;
  }

 private:
  std::size_t segment(double x) const {
    if (!(x >= x_.front() - 1e-12 * (1.0 + std::abs(x_.front())) &&
          x <= x_.back() + 1e-12 * (1.0 + std::abs(x_.back()))))
      throw DomainError("MonotoneCubic: evaluation point outside the node span");
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
  }

  void build_slopes() {
    const std::size_t n = x_.size();
    d_.assign(n, 0.0);
    const std::size_t m = std::min<std::size_t>(5, n);
    for (std::size_t i = 0; i < n; ++i) {
      // stencil of m consecutive nodes, centered where possible
      std::size_t lo = i >= m / 2 ? i - m / 2 : 0;
      lo = std::min(lo, n - m);
      double s = 0.0;
      for (std::size_t j = lo; j < lo + m; ++j) {
        if (j == i) {
          for (std::size_t k = lo; k < lo + m; ++k)
            if (k != i) s += y_[i] / (x_[i] - x_[k]);
          continue;
        }
        double num = 1.0, den = 1.0;
        for (std::size_t k = lo; k < lo + m; ++k) {
          if (k != j) den *= x_[j] - x_[k];
          if (k != j && k != i) num *= x_[i] - x_[k];
        }
        s += y_[j] * num / den;
      }
      d_[i] = s;
    }
    // Hyman filter, applied only where the secants over the two cells on
    // either side share a sign (zeros allowed); slopes next to an extremum
    // keep their full order.
    std::vector<double> sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i >= 2 ? i - 2 : 0;
      const std::size_t b = std::min(i + 1, n - 2);
      bool pos = false, neg = false;
      for (std::size_t j = a; j <= b; ++j) {
        pos = pos || sec[j] > 0.0;
        neg = neg || sec[j] < 0.0;
      }
      if (pos && neg) continue;
      const double dl = i > 0 ? sec[i - 1] : sec[0];
      const double dr = i + 1 < n ? sec[i] : sec[n - 2];
      const double cap = 3.0 * std::min(std::abs(dl), std::abs(dr));
      const double sgn = pos ? 1.0 : -1.0;
      d_[i] = sgn * std::clamp(sgn * d_[i], 0.0, cap);
    }
  }

  std::vector<double> x_, y_, d_;
};

/// Component-wise interpolation of complex samples.
class ComplexCubic {
 public:
  ComplexCubic() = default;
  ComplexCubic(const std::vector<double>& x, const std::vector<std::complex<double>>& v) {
    std::vector<double> re(v.size()), im(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      re[i] = v[i].real();
      im[i] = v[i].imag();
    }
    re_ = MonotoneCubic(x, std::move(re));
    im_ = MonotoneCubic(x, std::move(im));
  }
  std::complex<double> operator()(double x) const { return {re_(x), im_(x)}; }
  std::complex<double> derivative(double x) const { return {re_.derivative(x), im_.derivative(x)}; }
  double front() const { return re_.front(); }
  double back() const { return re_.back(); }
  bool contains(double x, double slack = 0.0) const { return re_.contains(x, slack); }

 private:
  MonotoneCubic re_, im_;
};

}  // namespace subjtime
