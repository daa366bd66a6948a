#pragma once

// Symmetric weighted Fourier transform
//   F(xi) = (1/sqrt(2 pi)) int f(t) exp(-i xi psi(t)) omega(t) psi'(t) dt,
// evaluated as the classical transform of the conjugated function v on a
// uniform subjective grid (direct summation), its inverse with the 1/omega
// prefactor, spectral multipliers and the weighted convolution.

#include <subjtime/detail/parallel.hpp>
#include <subjtime/errors.hpp>
#include <subjtime/interp.hpp>
#include <subjtime/quadrature.hpp>
#include <subjtime/signal.hpp>
#include <subjtime/time_geometry.hpp>

#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace subjtime {

inline const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

/// Transform values on a strictly increasing frequency grid.
struct SpectralGrid {
  std::vector<double> xi;
  std::vector<cplx> values;

  SpectralGrid() = default;
  SpectralGrid(std::vector<double> x, std::vector<cplx> v) : xi(std::move(x)), values(std::move(v)) { validate(); }

  std::size_t size() const { return xi.size(); }

  void validate() const {
    if (xi.size() != values.size()) throw DomainError("SpectralGrid: xi and values differ in length");
    for (std::size_t i = 0; i + 1 < xi.size(); ++i)
      if (!(xi[i + 1] > xi[i])) throw DomainError("SpectralGrid: xi must be strictly increasing");
    for (const auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("SpectralGrid: non-finite value");
  }

  double peak() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Local behaviour m(xi) ~ c_plus xi^p (xi > 0), c_minus |xi|^p (xi < 0) of a
/// multiplier that is not smooth at the origin; used to correct the
/// trapezoid sum there.
struct OriginTerm {
  double power;
  cplx c_plus;
  cplx c_minus;
};

/// Spectral multiplier m(xi).
struct Symbol {
  std::function<cplx(double)> eval;
  std::vector<OriginTerm> origin;
  std::string name;

  cplx operator()(double xi) const { return eval(xi); }
};

inline Symbol identity_symbol() {
  return {[](double) { return cplx(1.0); }, {}, "identity"};
}

/// (i xi)^a = |xi|^a exp(i a (pi/2) sign(xi)), principal branch, m(0) = 0.
inline Symbol frac_power_symbol(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("frac_power_symbol: alpha must lie in (0, 1]");
  const double half = 0.5 * std::numbers::pi * alpha;
  Symbol s;
  s.eval = [alpha, half](double xi) {
    if (xi == 0.0) return cplx(0.0);
    return std::polar(std::pow(std::abs(xi), alpha), xi > 0.0 ? half : -half);
  };
  if (alpha != 1.0) s.origin.push_back({alpha, std::polar(1.0, half), std::polar(1.0, -half)});
  s.name = "frac_power";
  return s;
}

/// ((i xi)^a + lambda)^(-1), the Kelvin-Voigt resolvent symbol.
inline Symbol kv_symbol(double alpha, double lambda) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("kv_symbol: alpha must lie in (0, 1)");
  if (!(lambda > 0.0)) throw DomainError("kv_symbol: lambda must be positive");
  const Symbol pw = frac_power_symbol(alpha);
  Symbol s;
  s.eval = [pw, lambda](double xi) { return 1.0 / (pw(xi) + lambda); };
  // 1/(z + lambda) = sum_k (-1)^k z^k / lambda^(k+1) with z = (i xi)^a;
  // integer powers k a are smooth and need no correction
  for (int k = 1; k * alpha < 5.0; ++k) {
    const double p = k * alpha;
    if (std::abs(p - std::round(p)) < 1e-12) continue;
    const double c = (k % 2 ? -1.0 : 1.0) / std::pow(lambda, k + 1);
    s.origin.push_back({p, std::polar(c, 0.5 * std::numbers::pi * p), std::polar(c, -0.5 * std::numbers::pi * p)});
  }
  s.name = "kv";
  return s;
}

/// Uniform symmetric frequency grid through 0 with step h covering [-xi_max, xi_max].
inline std::vector<double> frequency_grid(double xi_max, double h) {
  if (!(xi_max > 0.0) || !(h > 0.0)) throw DomainError("frequency_grid: xi_max and step must be positive");
  const long n = static_cast<long>(std::ceil(xi_max / h - 1e-9));
  std::vector<double> xi;
  xi.reserve(2 * n + 1);
  for (long k = -n; k <= n; ++k) xi.push_back(static_cast<double>(k) * h);
  return xi;
}

struct TransformOptions {
  std::size_t subjective_points = 0;  ///< resampling size; 0 picks max(4 n, 2048)
  double tail_tolerance = 1e-8;       ///< end magnitude allowed, relative to the peak
};

namespace detail {

// Step of a uniform grid, or nullopt.
inline std::optional<double> uniform_step(const std::vector<double>& x) {
  if (x.size() < 2) return std::nullopt;
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t k = 0; k < x.size(); ++k)
    if (std::abs(x[k] - (x.front() + static_cast<double>(k) * h)) > 1e-9 * h) return std::nullopt;
  return h;
}

inline void check_ends(const std::vector<cplx>& v, double tol, const char* what) {
  double peak = 0.0;
  for (const auto& z : v) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return;
  const double end = std::max(std::abs(v.front()), std::abs(v.back()));
  if (end > tol * peak) {
    std::ostringstream os;
    os << what << ": end magnitude " << end << " exceeds " << tol << " of the peak " << peak;
    throw TailTruncationError(os.str());
  }
}

}  // namespace detail

/// Conjugated samples of a lab-time grid function on a uniform subjective
/// grid spanning [psi(t_0), psi(t_n)].
inline GridFunction to_subjective_uniform(const GridFunction& f, const Profile& p, std::size_t n) {
  f.validate();
  if (n < 8) throw DomainError("to_subjective_uniform: need at least 8 points");
  const double a = p.scale(f.grid.front()), b = p.scale(f.grid.back());
  return conjugate(f, p, linspace(a, b, n));
}

/// (1/sqrt(2 pi)) int v(s) exp(-i xi s) ds for uniformly sampled v, trapezoid
/// with the first Gregory end correction.
inline SpectralGrid classical_forward(const GridFunction& v, const std::vector<double>& xi) {
  v.validate();
  const auto step = detail::uniform_step(v.grid);
  if (!step || v.size() < 3) throw DomainError("classical_forward: samples must be uniform with at least 3 points");
  const double ds = *step;
  double xmax = 0.0;
  for (double x : xi) xmax = std::max(xmax, std::abs(x));
  if (!(ds * xmax < 0.25 * std::numbers::pi)) {
    std::ostringstream os;
    os << "insufficient subjective resolution: ds * max|xi| = " << ds * xmax << " (needs < pi/4)";
    throw DomainError(os.str());
  }
  const std::size_t n = v.size();
  const auto& y = v.values;
  const cplx d0 = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * ds);
  const cplx d1 = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * ds);
  const double s0 = v.grid.front(), s1 = v.grid.back();
  std::vector<cplx> out(xi.size());
  detail::parallel_for(xi.size(), [&](std::size_t k) {
    const double w = xi[k];
    // phase by recurrence, re-anchored periodically against drift
    const cplx rot = std::polar(1.0, -w * ds);
    cplx ph(1.0), acc(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j % 64 == 0) ph = std::polar(1.0, -w * (v.grid[j] - s0));
      const double wt = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
      acc += wt * y[j] * ph;
      ph *= rot;
    }
    acc *= std::polar(1.0, -w * s0);
    const cplx ga = (d0 - cplx(0.0, w) * y[0]) * std::polar(1.0, -w * s0);
    const cplx gb = (d1 - cplx(0.0, w) * y[n - 1]) * std::polar(1.0, -w * s1);
    out[k] = kInvSqrt2Pi * (ds * acc - ds * ds / 12.0 * (gb - ga));
  });
  return SpectralGrid(xi, std::move(out));
}

/// Weighted transform of lab-time samples (monotone resampling to a uniform
/// subjective grid first).
inline SpectralGrid forward_transform(const GridFunction& f, const Profile& p, const std::vector<double>& xi,
                                      const TransformOptions& opt = {}) {
  const std::size_t n = opt.subjective_points ? opt.subjective_points : std::max<std::size_t>(4 * f.size(), 2048);
  const GridFunction v = to_subjective_uniform(f, p, n);
  detail::check_ends(v.values, opt.tail_tolerance, "forward_transform");
  return classical_forward(v, xi);
}

/// Weighted transform of a Signal, sampling v exactly on n uniform points of [s_lo, s_hi].
inline SpectralGrid forward_transform(const Signal& f, double s_lo, double s_hi, std::size_t n,
                                      const std::vector<double>& xi, const TransformOptions& opt = {}) {
  if (!(s_hi > s_lo)) throw DomainError("forward_transform: empty subjective window");
  const double L = f.profile().scale.range_inf();
  if (s_lo < L) throw DomainError("forward_transform: window starts below the range of psi");
  const auto s = linspace(s_lo, s_hi, n);
  GridFunction v = GridFunction::sample(s, [&f](double u) { return f.subjective(u); });
  detail::check_ends(v.values, opt.tail_tolerance, "forward_transform");
  return classical_forward(v, xi);
}

/// f(t) = (1/omega(t)) (1/sqrt(2 pi)) int m(xi) F(xi) exp(i xi psi(t)) d xi.
/// Trapezoid in xi; when m has origin terms the grid must be uniform through
/// 0 and the sum is corrected there with the zeta-function (Navot) terms.
inline GridFunction inverse_transform(const SpectralGrid& F, const Symbol& m, const Profile& p,
                                      const std::vector<double>& lab_grid, const TransformOptions& opt = {}) {
  F.validate();
  if (F.size() < 5) throw DomainError("inverse_transform: need at least 5 frequencies");
  const std::size_t n = F.size();
  std::vector<cplx> mf(n);
  for (std::size_t k = 0; k < n; ++k) mf[k] = m(F.xi[k]) * F.values[k];
  detail::check_ends(mf, opt.tail_tolerance, "inverse_transform: frequency window truncation");

  std::vector<double> wt(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double left = k > 0 ? F.xi[k] - F.xi[k - 1] : 0.0;
    const double right = k + 1 < n ? F.xi[k + 1] - F.xi[k] : 0.0;
    wt[k] = 0.5 * (left + right);
  }

  // origin correction data
  std::size_t z = 0;
  double h = 0.0;
  cplx F0, F1, F2;
  if (!m.origin.empty()) {
    const auto step = detail::uniform_step(F.xi);
    auto it = std::find(F.xi.begin(), F.xi.end(), 0.0);
    if (!step || it == F.xi.end())
      throw DomainError("inverse_transform: a symbol singular at 0 needs a uniform frequency grid through 0");
    h = *step;
    z = static_cast<std::size_t>(it - F.xi.begin());
    if (z < 2 || z + 2 >= n) throw DomainError("inverse_transform: xi = 0 too close to the grid end");
    const auto& v = F.values;
    F0 = v[z];
    F1 = (v[z - 2] - 8.0 * v[z - 1] + 8.0 * v[z + 1] - v[z + 2]) / (12.0 * h);
    F2 = (-v[z - 2] + 16.0 * v[z - 1] - 30.0 * v[z] + 16.0 * v[z + 1] - v[z + 2]) / (12.0 * h * h);
  }

  std::vector<cplx> out(lab_grid.size());
  detail::parallel_for(lab_grid.size(), [&](std::size_t i) {
    const double S = p.scale(lab_grid[i]);
    cplx acc(0.0);
    for (std::size_t k = 0; k < n; ++k) acc += wt[k] * mf[k] * std::polar(1.0, F.xi[k] * S);
    if (!m.origin.empty()) {
      // derivatives at 0 of G(xi) = F(xi) exp(i xi S)
      const cplx iS(0.0, S);
      const cplx G[3] = {F0, F1 + iS * F0, F2 + 2.0 * iS * F1 + iS * iS * F0};
      const double fact[3] = {1.0, 1.0, 2.0};
      for (const auto& term : m.origin)
        for (int j = 0; j < 3; ++j) {
          const cplx c = term.c_plus + (j % 2 ? -1.0 : 1.0) * term.c_minus;
          acc -= boost::math::zeta(-term.power - j) * std::pow(h, term.power + j + 1) / fact[j] * G[j] * c;
        }
    }
    out[i] = kInvSqrt2Pi * acc / p.weight(lab_grid[i]);
  });
  return GridFunction(lab_grid, std::move(out));
}

inline GridFunction inverse_transform(const SpectralGrid& F, const Profile& p, const std::vector<double>& lab_grid,
                                      const TransformOptions& opt = {}) {
  return inverse_transform(F, identity_symbol(), p, lab_grid, opt);
}

/// inverse(m * forward(f)).
inline GridFunction apply_multiplier(const Symbol& m, const GridFunction& f, const Profile& p,
                                     const std::vector<double>& xi, const std::vector<double>& lab_grid,
                                     const TransformOptions& opt = {}) {
  return inverse_transform(forward_transform(f, p, xi, opt), m, p, lab_grid, opt);
}

/// Trapezoid int F conj(G) d xi over a shared frequency grid.
inline cplx frequency_inner_product(const SpectralGrid& F, const SpectralGrid& G) {
  if (F.xi != G.xi) throw DomainError("frequency_inner_product: grids differ");
  cplx acc(0.0);
  for (std::size_t k = 0; k + 1 < F.size(); ++k)
    acc += 0.5 * (F.xi[k + 1] - F.xi[k]) *
           (F.values[k] * std::conj(G.values[k]) + F.values[k + 1] * std::conj(G.values[k + 1]));
  return acc;
}

struct PlancherelResult {
  cplx time_domain;       ///< int f conj(g) omega^2 psi' dt
  cplx frequency_domain;  ///< int F conj(G) d xi
  cplx time_domain_single_weight;  ///< int f conj(g) omega psi' dt, for comparison
  double norm_f = 0.0;    ///< ||f|| in the omega^2 psi' measure
  double norm_g = 0.0;

  double discrepancy() const {
    return std::abs(time_domain - frequency_domain) / std::max(norm_f * norm_g, 1e-300);
  }
};

namespace detail {

// int over the signal's window of h(t) psi'(t) dt in lab time; the window is
// cut into pieces of equal subjective length so each piece sees a resolved bump
template <class H>
cplx lab_window_integral(const Signal& f, double s_lo, double s_hi, H&& h, double rel_tol) {
  const Profile& p = f.profile();
  const int pieces = 64;
  cplx acc(0.0);
  for (int k = 0; k < pieces; ++k) {
    const double a = s_lo + (s_hi - s_lo) * k / pieces, b = s_lo + (s_hi - s_lo) * (k + 1) / pieces;
    const double ta = p.scale.inverse(a), tb = p.scale.inverse(b);
    auto g = [&](double t) { return h(t) * p.scale.deriv(t); };
    acc += integrate_adaptive(g, ta, tb, 1e-300, rel_tol, 4096).value;
  }
  return acc;
}

}  // namespace detail

/// Both sides of the Parseval identity. The time side is integrated in lab
/// time by adaptive quadrature, the frequency side from exact subjective
/// samples (n points over [s_lo, s_hi]) and a trapezoid in xi.
inline PlancherelResult plancherel_check(const Signal& f, const Signal& g, double s_lo, double s_hi, std::size_t n,
                                         const std::vector<double>& xi) {
  const Profile& p = f.profile();
  const double L = p.scale.range_inf();
  // stay strictly inside the range so psi^{-1} is finite
  const double a = std::isfinite(L) ? std::max(s_lo, L + 1e-12 * std::max(1.0, s_hi - L)) : s_lo;
  PlancherelResult r;
  r.time_domain = detail::lab_window_integral(
      f, a, s_hi, [&](double t) { const double w = p.weight(t); return f(t) * std::conj(g(t)) * w * w; }, 1e-12);
  r.time_domain_single_weight = detail::lab_window_integral(
      f, a, s_hi, [&](double t) { return f(t) * std::conj(g(t)) * p.weight(t); }, 1e-12);
  const double nf = detail::lab_window_integral(
                        f, a, s_hi, [&](double t) { const double w = p.weight(t); return std::norm(f(t)) * w * w; }, 1e-12)
                        .real();
  const double ng = detail::lab_window_integral(
                        f, a, s_hi, [&](double t) { const double w = p.weight(t); return std::norm(g(t)) * w * w; }, 1e-12)
                        .real();
  r.norm_f = std::sqrt(std::max(nf, 0.0));
  r.norm_g = std::sqrt(std::max(ng, 0.0));
  const SpectralGrid F = forward_transform(f, s_lo, s_hi, n, xi);
  const SpectralGrid G = forward_transform(g, s_lo, s_hi, n, xi);
  r.frequency_domain = frequency_inner_product(F, G);
  return r;
}

/// (f * g)(t) = (1/omega(t)) int (T f)(psi(t) - s) (T g)(s) ds, the convolution
/// of the conjugated functions carried back to lab time. Inputs are taken as
/// zero outside their grids; their conjugated ends must be negligible.
inline GridFunction weighted_convolution(const GridFunction& f, const GridFunction& g, const Profile& p,
                                         const std::vector<double>& lab_grid, const TransformOptions& opt = {}) {
  const std::size_t n = opt.subjective_points ? opt.subjective_points
                                              : std::max<std::size_t>(4 * std::max(f.size(), g.size()), 2048);
  const GridFunction vf = to_subjective_uniform(f, p, n);
  // g is resampled at the finer of the two steps so a narrow f is resolved
  const double span_g = p.scale(g.grid.back()) - p.scale(g.grid.front());
  const double step = std::min(vf.grid[1] - vf.grid[0], span_g / static_cast<double>(n - 1));
  const GridFunction vg = to_subjective_uniform(g, p, static_cast<std::size_t>(std::ceil(span_g / step)) + 1);
  detail::check_ends(vf.values, opt.tail_tolerance, "weighted_convolution: lag outside the sampled range");
  detail::check_ends(vg.values, opt.tail_tolerance, "weighted_convolution: lag outside the sampled range");
  const ComplexCubic fi(vf.grid, vf.values);
  const double ds = vg.grid[1] - vg.grid[0];
  const double f_lo = vf.grid.front(), f_hi = vf.grid.back();
  std::vector<cplx> out(lab_grid.size());
  detail::parallel_for(lab_grid.size(), [&](std::size_t i) {
    const double S = p.scale(lab_grid[i]);
    cplx acc(0.0);
    for (std::size_t j = 0; j < vg.size(); ++j) {
      const double x = S - vg.grid[j];
      if (x < f_lo || x > f_hi) continue;
      const double wt = (j == 0 || j + 1 == vg.size()) ? 0.5 : 1.0;
      acc += wt * fi(x) * vg.values[j];
    }
    out[i] = ds * acc / p.weight(lab_grid[i]);
  });
  return GridFunction(lab_grid, std::move(out));
}

}  // namespace subjtime
