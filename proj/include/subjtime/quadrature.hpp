#pragma once

// Quadrature engine shared by every operator: all integrals are taken in
// subjective time u, where each kernel reduces to a power of the lag S - u.
//
//   integrate_adaptive        globally adaptive Gauss-Kronrod (7/15) on a
//                             regular (possibly near-singular) integrand
//   integrate_power_singular  int_a^S (S-u)^p h(u) du, p > -1, on a graded
//                             mesh clustered at u = S; the innermost panel
//                             uses Gauss-Jacobi so the power is exact there

#include <subjtime/errors.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

namespace subjtime {

using cplx = std::complex<double>;

/// Tolerances and budgets for every quadrature in the library.
struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double tail_epsilon = 1e-12;    ///< decay-window threshold, relative to the peak
  double grading_exponent = 0.0;  ///< 0 selects max(2, 2/order), capped at max_grading
  int max_panels = 8192;
  double singular_span = 1.0;     ///< subjective length handled by the graded mesh
  double max_grading = 8.0;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(tail_epsilon > 0.0))
      throw DomainError("QuadratureSpec: tolerances must be positive");
    if (grading_exponent != 0.0 && !(grading_exponent >= 1.0))
      throw DomainError("QuadratureSpec: grading_exponent must be >= 1 (or 0 for automatic)");
    if (max_panels < 4) throw DomainError("QuadratureSpec: max_panels must be >= 4");
    if (!(singular_span > 0.0)) throw DomainError("QuadratureSpec: singular_span must be positive");
  }

  /// Grading exponent for a kernel whose singular order is `order`
  /// (alpha for (S-u)^(alpha-1), alpha for the Marchaud (S-u)^(-alpha) form).
  double grading_for(double order) const {
    if (grading_exponent != 0.0) return grading_exponent;
    return std::min(std::max(2.0, 2.0 / order), max_grading);
  }
};

struct QuadratureResult {
  cplx value;
  double error = 0.0;
  long evaluations = 0;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] (Newton on the three-term recurrence).
template <int N>
struct GaussLegendre {
  std::array<double, N> x{};
  std::array<double, N> w{};

  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= N; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = N * (z * p1 - p0) / (z * z - 1.0);
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }

  static const GaussLegendre& get() {
    static const GaussLegendre rule;
    return rule;
  }
};

constexpr int kPanelOrder = 16;

/// Gauss rule for int_0^1 x^p phi(x) dx (Golub-Welsch on the Jacobi matrix
/// for the weight (1+y)^p on [-1, 1]). Cached per exponent.
struct JacobiRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline std::shared_ptr<const JacobiRule> gauss_jacobi_unit(double p, int n = kPanelOrder) {
  static std::mutex mu;
  static std::map<std::pair<double, int>, std::shared_ptr<const JacobiRule>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, n});
    if (it != cache.end()) return it->second;
  }
  if (!(p > -1.0)) throw DomainError("gauss_jacobi_unit: exponent must exceed -1");
  const double a = 0.0, b = p;
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    sub(k - 1) = std::sqrt(num / den);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  // mu0 = int_{-1}^{1} (1+y)^p dy = 2^(p+1)/(p+1); mapping to [0,1] divides by 2^(p+1).
  const double mu0_unit = 1.0 / (p + 1.0);
  auto rule = std::make_shared<JacobiRule>();
  rule->x.resize(n);
  rule->w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double y = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule->x[i] = 0.5 * (1.0 + y);
    rule->w[i] = mu0_unit * v0 * v0;
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[{p, n}] = rule;
  return rule;
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<cplx, double> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx resk = fc * kWgk[7];
  cplx resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const cplx f1 = f(c - dx), f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b], starting from
/// `initial_pieces` equal panels.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                                    int max_intervals, int initial_pieces = 8) {
  QuadratureResult out;
  if (!(b > a)) return out;
  struct Piece {
    double a, b;
    cplx value;
    double err;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  std::priority_queue<Piece> heap;
  cplx total = 0.0;
  double total_err = 0.0;
  const int n0 = std::max(1, initial_pieces);
  for (int i = 0; i < n0; ++i) {
    const double lo = a + (b - a) * i / n0;
    const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
    auto [v, e] = detail::gk15(f, lo, hi);
    out.evaluations += 15;
    heap.push({lo, hi, v, e});
    total += v;
    total_err += e;
  }
  int intervals = n0;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (intervals >= max_intervals) {
      std::ostringstream os;
      os << "integrate_adaptive: panel budget exhausted on [" << a << ", " << b
         << "], error estimate " << total_err;
      throw ConvergenceError(os.str());
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval can no longer be split in double precision
      heap.push({worst.a, worst.b, worst.value, 0.0});
      total_err -= worst.err;
      continue;
    }
    auto [v1, e1] = detail::gk15(f, worst.a, mid);
    auto [v2, e2] = detail::gk15(f, mid, worst.b);
    out.evaluations += 30;
    total += v1 + v2 - worst.value;
    total_err += e1 + e2 - worst.err;
    heap.push({worst.a, mid, v1, e1});
    heap.push({mid, worst.b, v2, e2});
    ++intervals;
  }
  out.value = total;
  out.error = total_err;
  return out;
}

/// int_a^S (S-u)^p h(u) du for p > -1. The mesh clusters algebraically at
/// u = S (distance L (k/K)^g from S), panels whose end ratio exceeds 4 are
/// split geometrically, and the innermost panel is integrated with the
/// Gauss-Jacobi rule for weight (S-u)^p. K doubles until two successive
/// estimates agree.
template <class H>
QuadratureResult integrate_power_singular(H&& h, double S, double a, double p, double grading,
                                          double abs_tol, double rel_tol, int max_panels) {
  QuadratureResult out;
  const double L = S - a;
  if (!(L > 0.0)) return out;
  if (!(p > -1.0)) throw DomainError("integrate_power_singular: exponent must exceed -1");
  const auto& gl = detail::GaussLegendre<detail::kPanelOrder>::get();
  const auto jac = detail::gauss_jacobi_unit(p);

  auto panel = [&](double x0, double x1) {  // distances from S, x0 < x1
    const double c = 0.5 * (x0 + x1), hw = 0.5 * (x1 - x0);
    cplx acc = 0.0;
    for (int i = 0; i < detail::kPanelOrder; ++i) {
      const double x = c + hw * gl.x[i];
      acc += gl.w[i] * std::pow(x, p) * h(S - x);
    }
    out.evaluations += detail::kPanelOrder;
    return acc * hw;
  };

  auto estimate = [&](int K) {
    std::vector<double> xs(K + 1);
    for (int k = 0; k <= K; ++k) xs[k] = L * std::pow(static_cast<double>(k) / K, grading);
    xs[K] = L;
    cplx acc = 0.0;
    const double d = xs[1];
    for (std::size_t i = 0; i < jac->x.size(); ++i) acc += jac->w[i] * h(S - d * jac->x[i]);
    acc *= std::pow(d, p + 1.0);
    out.evaluations += static_cast<long>(jac->x.size());
    for (int k = 1; k < K; ++k) {
      const double x0 = xs[k], x1 = xs[k + 1];
      if (!(x1 > x0)) continue;
      const double ratio = x1 / x0;
      const int pieces = ratio > 4.0 ? static_cast<int>(std::ceil(std::log(ratio) / std::log(4.0))) : 1;
      double lo = x0;
      for (int j = 1; j <= pieces; ++j) {
        const double hi = (j == pieces) ? x1 : x0 * std::pow(ratio, static_cast<double>(j) / pieces);
        acc += panel(lo, hi);
        lo = hi;
      }
    }
    return acc;
  };

  int K = 8;
  cplx prev = estimate(K);
  for (;;) {
    K *= 2;
    if (K > max_panels) {
      std::ostringstream os;
      os << "integrate_power_singular: panel budget exhausted (exponent " << p << ", span " << L << ")";
      throw ConvergenceError(os.str());
    }
    const cplx cur = estimate(K);
    const double diff = std::abs(cur - prev);
    if (diff <= std::max(abs_tol, rel_tol * std::abs(cur))) {
      out.value = cur;
      out.error = diff;
      return out;
    }
    prev = cur;
  }
}

}  // namespace subjtime
