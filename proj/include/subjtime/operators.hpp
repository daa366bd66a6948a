#pragma once

// Weighted Weyl fractional integral and derivative. Every operator is
// evaluated in subjective time u = psi(tau), where it becomes the classical
// Weyl operator applied to the conjugated function v, then divided by
// omega(t):
//   I^a f(t) = (1/(Gamma(a) omega(t))) int_{-inf}^{S} (S-u)^(a-1) v(u) du
//   D^a f(t) = (c_a/omega(t)) int_{-inf}^{S} (v(S)-v(u)) (S-u)^(-1-a) du,
// with S = psi(t), c_a = a/Gamma(1-a). Below range_inf the conjugated
// function is zero.

#include <subjtime/detail/parallel.hpp>
#include <subjtime/errors.hpp>
#include <subjtime/quadrature.hpp>
#include <subjtime/signal.hpp>
#include <subjtime/special_fn.hpp>
#include <subjtime/time_geometry.hpp>

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

namespace subjtime {

/// Order of a fractional operator.
struct FracOrder {
  double alpha;
  FracOrder(double a) : alpha(a) {}  // NOLINT: implicit on purpose

  void check_integral() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("fractional integral: order must be > 0");
  }
  void check_derivative() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw DomainError("fractional derivative: order must lie in (0, 1); use first_order for alpha = 1");
  }
};

/// Value plus diagnostics.
struct OpResult {
  cplx value;
  double error = 0.0;    ///< quadrature error estimate (absolute)
  std::string warning;   ///< empty unless something looked fragile
};

/// Normalization of the Marchaud form, alpha / Gamma(1 - alpha).
inline double marchaud_constant(double alpha) { return alpha * reciprocal_gamma(1.0 - alpha); }

namespace detail {

// Resolved integration window for a signal at upper limit S.
struct Span {
  double lo;
  double hi;
  double peak;
  bool clipped;   // lo sits on range_inf (nothing was truncated)
  bool infinite;  // no lower end: the signal does not decay into the past
};

inline Span resolve_span(const Signal& f, double S, const QuadratureSpec& q) {
  const Window w = f.window(S, q.tail_epsilon);
  Span s{w.lo, w.hi, w.peak, false, false};
  const double L = f.profile().scale.range_inf();
  if (!(s.lo > L)) {
    s.lo = L;
    s.clipped = true;
  }
  s.infinite = !std::isfinite(s.lo);
  return s;
}

inline void check_tail(const Signal& f, const Span& s, const QuadratureSpec& q) {
  if (s.clipped || s.infinite || s.peak == 0.0) return;
  const double at_lo = std::abs(f.subjective(s.lo));
  if (at_lo > 100.0 * q.tail_epsilon * s.peak + q.abs_tol) {
    std::ostringstream os;
    os << "decay window does not bound the signal: |v(" << s.lo << ")| = " << at_lo << " vs peak " << s.peak;
    throw TailTruncationError(os.str());
  }
}

inline double abs_tol_for(const Span& s, const QuadratureSpec& q) {
  return q.abs_tol * std::max(s.peak, 1e-300);
}

}  // namespace detail

/// (1/Gamma(a)) int_lo^S (S-u)^(a-1) v(u) du for a subjective-time signal
/// (classical Weyl integral of the conjugated function, no weight factor).
inline OpResult classical_weyl_integral(double alpha, const Signal& f, double S, const QuadratureSpec& q) {
  FracOrder(alpha).check_integral();
  q.validate();
  const detail::Span sp = detail::resolve_span(f, S, q);
  if (sp.infinite) throw TailTruncationError("weyl integral: signal window has no finite lower end");
  OpResult out{0.0, 0.0, {}};
  if (!(S > sp.lo)) return out;
  detail::check_tail(f, sp, q);
  const double abs_tol = detail::abs_tol_for(sp, q);
  auto v = [&f](double u) { return f.subjective(u); };
  const double b = std::min(S, sp.hi);
  cplx acc = 0.0;
  double err = 0.0;
  if (b < S) {
    auto kern = [&](double u) { return std::pow(S - u, alpha - 1.0) * v(u); };
    const auto r = integrate_adaptive(kern, sp.lo, b, abs_tol, q.rel_tol, q.max_panels);
    acc = r.value;
    err = r.error;
  } else {
    const double delta = std::min(S - sp.lo, q.singular_span);
    const auto rs = integrate_power_singular(v, S, S - delta, alpha - 1.0, q.grading_for(alpha), abs_tol,
                                             q.rel_tol, q.max_panels);
    acc = rs.value;
    err = rs.error;
    if (S - delta > sp.lo) {
      auto kern = [&](double u) { return std::pow(S - u, alpha - 1.0) * v(u); };
      const auto rr = integrate_adaptive(kern, sp.lo, S - delta, abs_tol, q.rel_tol, q.max_panels);
      acc += rr.value;
      err += rr.error;
    }
  }
  const double rg = reciprocal_gamma(alpha);
  return {acc * rg, err * rg, {}};
}

/// c_a [ int_lo^S (v(S)-v(u)) (S-u)^(-1-a) du + v(S) (S-lo)^(-a)/a ]: the
/// classical Weyl-Marchaud derivative of the conjugated function, v taken as
/// zero below lo.
inline OpResult classical_weyl_marchaud(double alpha, const Signal& f, double S, const QuadratureSpec& q) {
  FracOrder(alpha).check_derivative();
  q.validate();
  const detail::Span sp = detail::resolve_span(f, S, q);
  OpResult out{0.0, 0.0, {}};
  if (!(S > sp.lo)) return out;
  detail::check_tail(f, sp, q);
  const double abs_tol = detail::abs_tol_for(sp, q);
  const double c = marchaud_constant(alpha);
  auto v = [&f](double u) { return f.subjective(u); };

  if (S > sp.hi && !sp.infinite) {
    // v(S) is negligible: only the far part of the state difference remains
    auto kern = [&](double u) { return v(u) * std::pow(S - u, -1.0 - alpha); };
    const auto r = integrate_adaptive(kern, sp.lo, sp.hi, abs_tol, q.rel_tol, q.max_panels);
    return {-c * r.value, c * r.error, {}};
  }

  const cplx vS = v(S);
  const double delta = sp.infinite ? q.singular_span : std::min(S - sp.lo, q.singular_span);
  auto h = [&](double u) { return (vS - v(u)) / (S - u); };
  // The difference quotient loses digits as u -> S, so strong grading only
  // amplifies rounding; the Gauss-Jacobi panel already absorbs the power.
  const double grading = q.grading_exponent != 0.0 ? q.grading_exponent : 2.0;
  const cplx near_tail = vS * std::pow(delta, -alpha) / alpha;
  // accuracy is judged against the local state scale, not the (possibly
  // cancelling) quotient integral alone
  const double sing_tol = std::max(abs_tol, q.rel_tol * std::abs(near_tail));
  const auto rs = integrate_power_singular(h, S, S - delta, -alpha, grading, sing_tol, q.rel_tol, q.max_panels);
  cplx acc = rs.value + near_tail;
  double err = rs.error;
  if (sp.infinite) {
    // int_{-inf}^{S-delta} (v(S)-v(u)) (S-u)^(-1-a) du with S-u = delta y^(-1/a),
    // which turns the kernel and Jacobian into the constant delta^(-a)/a
    auto g = [&](double y) { return y <= 0.0 ? cplx(0.0) : vS - v(S - delta * std::pow(y, -1.0 / alpha)); };
    const auto rr = integrate_adaptive(g, 0.0, 1.0, abs_tol, q.rel_tol, q.max_panels);
    const double jac = std::pow(delta, -alpha) / alpha;
    // the (S-lo)^(-a) tail term is absent: nothing is zero-extended
    acc = rs.value + rr.value * jac;
    err += rr.error * jac;
  } else if (S - delta > sp.lo) {
    auto kern = [&](double u) { return v(u) * std::pow(S - u, -1.0 - alpha); };
    const auto rr = integrate_adaptive(kern, sp.lo, S - delta, abs_tol, q.rel_tol, q.max_panels);
    acc -= rr.value;
    err += rr.error;
  }
  out.value = c * acc;
  out.error = c * err;
  if (rs.error > 1e3 * std::max(sing_tol, q.rel_tol * std::abs(rs.value)))
    out.warning = "near-endpoint panel converged slowly; the weighted state may not be Lipschitz at t";
  return out;
}

/// Weighted Weyl integral I^a f(t).
inline OpResult weyl_integral_detailed(FracOrder alpha, const Signal& f, double t, const QuadratureSpec& q = {}) {
  alpha.check_integral();
  const Profile& p = f.profile();
  OpResult r = classical_weyl_integral(alpha.alpha, f, p.scale(t), q);
  const double w = p.weight(t);
  r.value /= w;
  r.error /= w;
  return r;
}

inline cplx weyl_integral(FracOrder alpha, const Signal& f, double t, const QuadratureSpec& q = {}) {
  return weyl_integral_detailed(alpha, f, t, q).value;
}

/// Weighted Weyl derivative in Marchaud (hypersingular) form.
inline OpResult weyl_derivative_marchaud_detailed(FracOrder alpha, const Signal& f, double t,
                                                  const QuadratureSpec& q = {}) {
  alpha.check_derivative();
  const Profile& p = f.profile();
  OpResult r = classical_weyl_marchaud(alpha.alpha, f, p.scale(t), q);
  const double w = p.weight(t);
  r.value /= w;
  r.error /= w;
  return r;
}

inline cplx weyl_derivative_marchaud(FracOrder alpha, const Signal& f, double t, const QuadratureSpec& q = {}) {
  return weyl_derivative_marchaud_detailed(alpha, f, t, q).value;
}

/// Default laboratory-time step for the 5-point stencils: a subjective step
/// of rel_tol^(1/4) mapped back through psi'(t).
inline double default_fd_step(const Profile& p, double t, double rel_tol) {
  return std::pow(rel_tol, 0.25) / p.scale.deriv(t);
}

/// Weighted derivative as D1(I^(1-a) f), D1 = (1/(omega psi')) d/dt (omega .),
/// with a 5-point central difference of step fd_step (0 selects the default).
inline OpResult weyl_derivative_rl_detailed(FracOrder alpha, const Signal& f, double t, const QuadratureSpec& q = {},
                                            double fd_step = 0.0) {
  alpha.check_derivative();
  if (fd_step < 0.0) throw DomainError("weyl_derivative_rl: fd_step must be positive");
  const Profile& p = f.profile();
  const double h = fd_step > 0.0 ? fd_step : default_fd_step(p, t, q.rel_tol);
  cplx g[4];
  double err = 0.0;
  const double offs[4] = {-2.0, -1.0, 1.0, 2.0};
  for (int i = 0; i < 4; ++i) {
    // omega * I^(1-a) f at t + k h, i.e. the classical integral at psi(t + k h)
    const OpResult r = classical_weyl_integral(1.0 - alpha.alpha, f, p.scale(t + offs[i] * h), q);
    g[i] = r.value;
    err += r.error;
  }
  const cplx dg = (g[0] - 8.0 * g[1] + 8.0 * g[2] - g[3]) / (12.0 * h);
  const double denom = p.weight(t) * p.scale.deriv(t);
  OpResult out{dg / denom, 1.5 * err / (h * denom), {}};
  if (out.error > q.rel_tol * std::abs(out.value) && out.error > q.abs_tol)
    out.warning = "finite-difference noise exceeds rel_tol; increase fd_step or tighten quadrature";
  return out;
}

inline cplx weyl_derivative_rl(FracOrder alpha, const Signal& f, double t, const QuadratureSpec& q = {},
                               double fd_step = 0.0) {
  return weyl_derivative_rl_detailed(alpha, f, t, q, fd_step).value;
}

/// D1 f(t) = (1/(omega psi')) d/dt (omega f), 5-point stencil. fd_step = 0
/// picks a subjective step of 1e-3.
inline cplx first_order(const Signal& f, double t, double fd_step = 0.0) {
  if (fd_step < 0.0) throw DomainError("first_order: fd_step must be positive");
  const Profile& p = f.profile();
  const double h = fd_step > 0.0 ? fd_step : 1e-3 / p.scale.deriv(t);
  auto wf = [&](double tau) { return f.subjective(p.scale(tau)); };
  const cplx d = (wf(t - 2 * h) - 8.0 * wf(t - h) + 8.0 * wf(t + h) - wf(t + 2 * h)) / (12.0 * h);
  return d / (p.weight(t) * p.scale.deriv(t));
}

/// I^a f as a Signal (each evaluation is a quadrature).
inline Signal integral_signal(FracOrder alpha, const Signal& f, const QuadratureSpec& q = {}) {
  alpha.check_integral();
  const double a = alpha.alpha;
  const Profile p = f.profile();
  Signal::Fn subj = [a, f, q](double u) { return classical_weyl_integral(a, f, u, q).value; };
  Signal::Fn lab = [p, subj](double t) { return subj(p.scale(t)) / p.weight(t); };
  Signal::WindowFn w = [a, f](double S, double eps) {
    const Window wf = f.window(S, eps);
    const double top = std::min(S, wf.hi);
    const double span = std::max(top - wf.lo, 1.0);
    return Window{wf.lo, std::numeric_limits<double>::infinity(),
                  wf.peak * std::pow(span, a) * reciprocal_gamma(1.0 + a)};
  };
  return Signal(p, std::move(lab), std::move(subj), std::move(w));
}

/// D^a f (Marchaud form) as a Signal.
inline Signal derivative_signal(FracOrder alpha, const Signal& f, const QuadratureSpec& q = {}) {
  alpha.check_derivative();
  const double a = alpha.alpha;
  const Profile p = f.profile();
  Signal::Fn subj = [a, f, q](double u) { return classical_weyl_marchaud(a, f, u, q).value; };
  Signal::Fn lab = [p, subj](double t) { return subj(p.scale(t)) / p.weight(t); };
  Signal::WindowFn w = [f](double S, double eps) {
    const Window wf = f.window(S, eps);
    return Window{wf.lo, std::numeric_limits<double>::infinity(), wf.peak};
  };
  return Signal(p, std::move(lab), std::move(subj), std::move(w));
}

/// Evaluates an operator over a grid of laboratory times (parallel sweep).
template <class Op>
GridFunction evaluate_on_grid(const std::vector<double>& grid, Op&& op) {
  std::vector<cplx> vals(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) { vals[i] = op(grid[i]); });
  return GridFunction(grid, std::move(vals));
}

/// sup_t |D^a(I^a f)(t) - f(t)| / sup |f| over the grid.
inline double left_inverse_check(FracOrder alpha, const Signal& f, const std::vector<double>& grid,
                                 const QuadratureSpec& q = {}) {
  alpha.check_derivative();
  const Signal J = integral_signal(alpha, f, q);
  std::vector<double> err(grid.size()), mag(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    const cplx fi = f(grid[i]);
    mag[i] = std::abs(fi);
    err[i] = std::abs(weyl_derivative_marchaud(alpha, J, grid[i], q) - fi);
  });
  double e = 0.0, m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    e = std::max(e, err[i]);
    m = std::max(m, mag[i]);
  }
  if (m == 0.0) return e == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return e / m;
}

/// Classical Weyl-Marchaud derivative of uniformly sampled subjective-time
/// data (interpolated, zero before the first sample). Used for the
/// conjugate -> classical -> conjugate_inverse route.
inline GridFunction classical_marchaud_on_grid(double alpha, const GridFunction& v, const std::vector<double>& at,
                                               const QuadratureSpec& q = {}) {
  const Profile id = standard_profile();
  const Signal sv = Signal::from_grid(id, v);
  return evaluate_on_grid(at, [&](double s) { return classical_weyl_marchaud(alpha, sv, s, q).value; });
}

}  // namespace subjtime
