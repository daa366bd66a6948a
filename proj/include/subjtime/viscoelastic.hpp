#pragma once

// Aging fractional Kelvin-Voigt model  D^a sigma + lambda sigma = f.
//
// The Green's function lives on the subjective lag s = psi(t) - psi(tau) > 0,
//   g(s) = s^(a-1) E_{a,a}(-lambda s^a),
// and the causal solution is sigma(t) = (1/omega(t)) int g(psi(t) - u) v(u) du
// with v the conjugated forcing. A spectral solver (multiplier
// ((i xi)^a + lambda)^(-1)) runs alongside for cross-validation.

#include <subjtime/detail/parallel.hpp>
#include <subjtime/errors.hpp>
#include <subjtime/operators.hpp>
#include <subjtime/quadrature.hpp>
#include <subjtime/signal.hpp>
#include <subjtime/special_fn.hpp>
#include <subjtime/spectral.hpp>
#include <subjtime/time_geometry.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace subjtime {

struct KVModel {
  double alpha = 0.8;
  double lambda = 1.0;
  Profile profile = standard_profile();

  /// alpha = 1 is accepted as the classical limit.
  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("KVModel: alpha must lie in (0, 1]");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("KVModel: lambda must be positive");
  }
};

/// g(s) = s^(a-1) E_{a,a}(-lambda s^a), s > 0.
inline double greens_lag_kernel(double alpha, double lambda, double s) {
  if (!(s > 0.0)) throw DomainError("greens_lag_kernel: lag must be positive");
  if (alpha == 1.0) return std::exp(-lambda * s);
  return std::pow(s, alpha - 1.0) * mittag_leffler(alpha, alpha, -lambda * std::pow(s, alpha));
}

/// Tabulated E_{a,a}(-x) for repeated kernel evaluation: piecewise Chebyshev
/// interpolation on [0, X], where X is the point from which the asymptotic
/// expansion is certified (direct evaluation beyond it is cheap).
class LagKernel {
 public:
  static std::shared_ptr<const LagKernel> get(double alpha) {
    static std::mutex mu;
    static std::map<double, std::shared_ptr<const LagKernel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(alpha);
    if (it != cache.end()) return it->second;
    auto k = std::shared_ptr<const LagKernel>(new LagKernel(alpha));
    cache.emplace(alpha, k);
    return k;
  }

  double alpha() const { return alpha_; }
  double table_end() const { return X_; }

  /// E_{a,a}(-x), x >= 0.
  double phi(double x) const {
    if (alpha_ == 1.0) return std::exp(-x);
    if (x >= X_) return mittag_leffler(alpha_, alpha_, -x);
    const std::size_t k = std::min(static_cast<std::size_t>(x / width_), panels_ - 1);
    const double a = k * width_;
    const double y = 2.0 * (x - a) / width_ - 1.0;
    const double* f = &values_[k * kNodes];
    double num = 0.0, den = 0.0;
    for (int j = 0; j < kNodes; ++j) {
      const double d = y - nodes_[j];
      if (d == 0.0) return f[j];
      const double w = weights_[j] / d;
      num += w * f[j];
      den += w;
    }
    return num / den;
  }

  /// g(s) for the given lambda.
  double operator()(double lambda, double s) const {
    if (alpha_ == 1.0) return std::exp(-lambda * s);
    return std::pow(s, alpha_ - 1.0) * phi(lambda * std::pow(s, alpha_));
  }

 private:
  static constexpr int kNodes = 24;

  explicit LagKernel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("LagKernel: alpha must lie in (0, 1]");
    for (int j = 0; j < kNodes; ++j) {
      nodes_[j] = -std::cos(std::numbers::pi * j / (kNodes - 1));
      weights_[j] = (j % 2 ? -1.0 : 1.0) * ((j == 0 || j == kNodes - 1) ? 0.5 : 1.0);
    }
    if (alpha == 1.0) return;
    // first x where the certified asymptotic regime takes over
    X_ = 1.0;
    while (X_ < 4096.0 && mittag_leffler_detailed(alpha, alpha, cplx(-X_)).regime != MLRegime::Asymptotic)
      X_ = X_ < 64.0 ? X_ + 1.0 : 2.0 * X_;
    panels_ = static_cast<std::size_t>(std::ceil(X_ / 2.0));
    width_ = X_ / static_cast<double>(panels_);
    values_.resize(panels_ * kNodes);
    detail::parallel_for(panels_ * kNodes, [&](std::size_t i) {
      const std::size_t k = i / kNodes;
      const int j = static_cast<int>(i % kNodes);
      const double x = (k + 0.5 * (nodes_[j] + 1.0)) * width_;
      values_[i] = mittag_leffler(alpha, alpha, -x);
    });
  }

  double alpha_;
  double X_ = 0.0;
  double width_ = 1.0;
  std::size_t panels_ = 0;
  double nodes_[kNodes];
  double weights_[kNodes];
  std::vector<double> values_;
};

/// K(t, tau) = g(psi(t) - psi(tau)), tau < t.
inline double effective_kernel(const KVModel& m, double t, double tau) {
  m.validate();
  if (!(tau < t)) throw DomainError("effective_kernel: need tau < t");
  const double s = m.profile.scale(t) - m.profile.scale(tau);
  if (!(s > 0.0)) throw DomainError("effective_kernel: subjective lag underflowed to zero");
  return greens_lag_kernel(m.alpha, m.lambda, s);
}

/// sigma at lab time t for a decaying forcing Signal (convolution in subjective time).
inline OpResult solve_kv_point(const KVModel& m, const Signal& f, double t, const QuadratureSpec& q = {}) {
  const Profile& p = m.profile;
  const double S = p.scale(t);
  const detail::Span sp = detail::resolve_span(f, S, q);
  if (sp.infinite) throw TailTruncationError("solve_kv: forcing window has no finite lower end");
  OpResult out{0.0, 0.0, {}};
  if (!(S > sp.lo)) return out;
  detail::check_tail(f, sp, q);
  const double abs_tol = detail::abs_tol_for(sp, q);
  const auto K = LagKernel::get(m.alpha);
  const double a = m.alpha, lam = m.lambda;
  auto v = [&f](double u) { return f.subjective(u); };
  auto full = [&](double u) { return (*K)(lam, S - u) * v(u); };

  if (S > sp.hi) {
    const auto r = integrate_adaptive(full, sp.lo, sp.hi, abs_tol, q.rel_tol, q.max_panels);
    out.value = r.value;
    out.error = r.error;
  } else {
    const double delta = std::min(S - sp.lo, q.singular_span);
    // (S-u)^(a-1) is taken by the quadrature weight; the rest carries E(-lambda (S-u)^a)
    auto h = [&](double u) { return K->phi(lam * std::pow(S - u, a)) * v(u); };
    const auto rs = integrate_power_singular(h, S, S - delta, a - 1.0, q.grading_for(a), abs_tol, q.rel_tol,
                                             q.max_panels);
    out.value = rs.value;
    out.error = rs.error;
    if (S - delta > sp.lo) {
      const auto rr = integrate_adaptive(full, sp.lo, S - delta, abs_tol, q.rel_tol, q.max_panels);
      out.value += rr.value;
      out.error += rr.error;
    }
  }
  const double w = p.weight(t);
  out.value /= w;
  out.error /= w;
  return out;
}

/// Time-domain solution on a lab grid (parallel over output points).
inline GridFunction solve_kv_timedomain(const KVModel& m, const Signal& f, const std::vector<double>& lab_grid,
                                        const QuadratureSpec& q = {}) {
  m.validate();
  q.validate();
  return evaluate_on_grid(lab_grid, [&](double t) { return solve_kv_point(m, f, t, q).value; });
}

/// Grid forcing (interpolated, zero outside its span).
inline GridFunction solve_kv_timedomain(const KVModel& m, const GridFunction& f, const std::vector<double>& lab_grid,
                                        const QuadratureSpec& q = {}) {
  return solve_kv_timedomain(m, Signal::from_grid(m.profile, f), lab_grid, q);
}

/// Symbol of the resolvent, including the classical alpha = 1 case.
inline Symbol kv_resolvent_symbol(double alpha, double lambda) {
  if (alpha < 1.0) return kv_symbol(alpha, lambda);
  return {[lambda](double xi) { return 1.0 / (cplx(0.0, xi) + lambda); }, {}, "kv1"};
}

/// Spectral solution: inverse(((i xi)^a + lambda)^(-1) forward(f)).
inline GridFunction solve_kv_spectral(const KVModel& m, const GridFunction& f, const std::vector<double>& lab_grid,
                                      const std::vector<double>& xi_grid, const TransformOptions& opt = {}) {
  m.validate();
  return apply_multiplier(kv_resolvent_symbol(m.alpha, m.lambda), f, m.profile, xi_grid, lab_grid, opt);
}

/// The time-domain solution as a Signal; every value is a fresh solve, so
/// operators applied to it see the exact solution rather than an interpolant.
inline Signal solution_signal(const KVModel& m, const Signal& f, const QuadratureSpec& q = {}) {
  m.validate();
  const Profile p = m.profile;
  Signal::Fn lab = [m, f, q](double t) { return solve_kv_point(m, f, t, q).value; };
  Signal::Fn subj = [m, f, q, p](double u) {
    if (!(u > p.scale.range_inf())) return cplx(0.0);
    const double t = p.scale.inverse(u);
    return solve_kv_point(m, f, t, q).value * p.weight(t);
  };
  Signal::WindowFn w = [f, lam = m.lambda](double S, double eps) {
    const Window wf = f.window(S, eps);
    return Window{wf.lo, std::numeric_limits<double>::infinity(), wf.peak / std::min(lam, 1.0)};
  };
  return Signal(p, std::move(lab), std::move(subj), std::move(w));
}

/// sup_t |D^a sigma + lambda sigma - f| / sup |f| at the given lab points
/// (Marchaud form; first-order operator when alpha = 1).
inline double kv_residual(const Signal& sigma, const Signal& f, const KVModel& m, const std::vector<double>& at,
                          const QuadratureSpec& q = {}) {
  m.validate();
  std::vector<double> res(at.size()), mag(at.size());
  detail::parallel_for(at.size(), [&](std::size_t i) {
    const double t = at[i];
    const cplx d = m.alpha < 1.0 ? weyl_derivative_marchaud(m.alpha, sigma, t, q) : first_order(sigma, t);
    const cplx ft = f(t);
    res[i] = std::abs(d + m.lambda * sigma(t) - ft);
    mag[i] = std::abs(ft);
  });
  const double r = at.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  const double s = at.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  if (s == 0.0) return r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return r / s;
}

/// Grid version: sigma and f are interpolated; the residual is probed on
/// interior sigma nodes (at most max_probes of them, evenly strided).
inline double kv_residual(const GridFunction& sigma, const GridFunction& f, const KVModel& m,
                          const QuadratureSpec& q = {}, std::size_t max_probes = 64) {
  sigma.validate();
  f.validate();
  if (sigma.size() < 8) throw DomainError("kv_residual: sigma needs at least 8 samples");
  const Signal ss = Signal::from_grid(m.profile, sigma);
  const Signal fs = Signal::from_grid(m.profile, f);
  std::vector<double> at;
  const std::size_t lo = 2, hi = sigma.size() - 3;
  const std::size_t stride = std::max<std::size_t>(1, (hi - lo) / std::max<std::size_t>(1, max_probes - 1));
  for (std::size_t i = lo; i <= hi; i += stride) {
    const double t = sigma.grid[i];
    if (t >= f.grid.front() && t <= f.grid.back()) at.push_back(t);
  }
  return kv_residual(ss, fs, m, at, q);
}

// ---------------------------------------------------------------------------
// Decay laws

enum class FitMode { LogLog, SemiLog };

inline std::string to_string(FitMode m) { return m == FitMode::LogLog ? "loglog" : "semilog"; }

inline FitMode parse_fit_mode(const std::string& s) {
  if (s == "loglog") return FitMode::LogLog;
  if (s == "semilog") return FitMode::SemiLog;
  throw DomainError("unknown fit mode '" + s + "' (expected loglog or semilog)");
}

struct DecayFit {
  FitMode mode = FitMode::LogLog;
  double slope_or_rate = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Least-squares line through (log x, log|y|) or (x, log|y|). The samples
/// must be strictly decreasing in magnitude and above the underflow floor.
inline DecayFit fit_decay(const std::vector<double>& x, const std::vector<double>& y, FitMode mode) {
  if (x.size() != y.size()) throw DomainError("fit_decay: x and y differ in length");
  if (x.size() < 10) throw DomainError("fit_decay: need at least 10 samples");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i + 1] > x[i])) throw DomainError("fit_decay: abscissae must be strictly increasing");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(std::abs(y[i]) > 1e-300) || !std::isfinite(y[i]))
      throw ConvergenceError("fit_decay: kernel underflow in the fit window");
    if (i > 0 && !(std::abs(y[i]) < std::abs(y[i - 1])))
      throw DomainError("fit_decay: samples are not monotonically decaying in the fit window");
  }
  if (mode == FitMode::LogLog && !(x.front() > 0.0)) throw DomainError("fit_decay: loglog needs positive abscissae");
  const std::size_t n = x.size();
  std::vector<double> X(n), Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X[i] = mode == FitMode::LogLog ? std::log(x[i]) : x[i];
    Y[i] = std::log(std::abs(y[i]));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  DecayFit fit;
  fit.mode = mode;
  fit.slope_or_rate = sxy / sxx;
  fit.intercept = my - fit.slope_or_rate * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = Y[i] - (fit.intercept + fit.slope_or_rate * X[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  fit.t_min = x.front();
  fit.t_max = x.back();
  return fit;
}

/// Fit of K(t, 0) over the given lab times.
inline DecayFit amnesia_fit(const KVModel& m, const std::vector<double>& t_samples, FitMode mode) {
  m.validate();
  std::vector<double> k(t_samples.size());
  for (std::size_t i = 0; i < t_samples.size(); ++i) {
    if (!(t_samples[i] > 0.0)) throw DomainError("amnesia_fit: sample times must be positive");
    k[i] = effective_kernel(m, t_samples[i], 0.0);
  }
  return fit_decay(t_samples, k, mode);
}

// ---------------------------------------------------------------------------
// Relaxation experiment

/// f(t) = (A/omega(t)) exp(-(psi(t) - s0)^2 / (2 w^2)).
struct ForcingSpec {
  double center = 1.0;
  double width = 0.1;
  double amplitude = 1.0;

  void validate() const {
    if (!(width > 0.0)) throw DomainError("ForcingSpec: width must be positive");
    if (!std::isfinite(center) || !std::isfinite(amplitude)) throw DomainError("ForcingSpec: non-finite parameter");
  }
};

inline Signal pulse_forcing(const Profile& p, const ForcingSpec& spec) {
  spec.validate();
  return subjective_gaussian(p, spec.center, spec.width, 0.0, spec.amplitude);
}

struct Scenario {
  std::string label;
  KVModel model;
};

struct ScenarioCurve {
  std::string label;
  KVModel model;
  GridFunction sigma;
};

/// The three Figure-1 models: standard, rapid aging psi = e^{0.8 t}, weighted damping omega = e^{0.5 t}.
inline std::vector<Scenario> figure1_scenarios(double alpha = 0.8, double lambda = 1.0) {
  return {{"standard", {alpha, lambda, {ScaleFunction::linear(1.0, 0.0), WeightFunction::constant(1.0), "standard"}}},
          {"rapid_aging",
           {alpha, lambda, {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "rapid_aging"}}},
          {"weighted_damping",
           {alpha, lambda, {ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "weighted_damping"}}}};
}

inline std::vector<ScenarioCurve> relaxation_experiment(const std::vector<Scenario>& scenarios,
                                                        const ForcingSpec& forcing,
                                                        const std::vector<double>& lab_grid,
                                                        const QuadratureSpec& q = {}) {
  if (scenarios.empty()) throw DomainError("relaxation_experiment: no scenarios");
  std::vector<ScenarioCurve> out;
  for (const auto& sc : scenarios) {
    const Signal f = pulse_forcing(sc.model.profile, forcing);
    out.push_back({sc.label, sc.model, solve_kv_timedomain(sc.model, f, lab_grid, q)});
  }
  return out;
}

/// Tail fit of an emitted curve over lab times [t_min, t_max]. The conjugated
/// response omega*sigma is used; loglog fits against the subjective lag
/// psi(t) - s0 since the pulse, semilog against lab time.
inline DecayFit curve_tail_fit(const ScenarioCurve& c, const ForcingSpec& forcing, FitMode mode, double t_min,
                               double t_max) {
  const Profile& p = c.model.profile;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < c.sigma.size(); ++i) {
    const double t = c.sigma.grid[i];
    if (t < t_min || t > t_max) continue;
    x.push_back(mode == FitMode::LogLog ? p.scale(t) - forcing.center : t);
    y.push_back(p.weight(t) * c.sigma.values[i].real());
  }
  DecayFit fit = fit_decay(x, y, mode);
  fit.t_min = t_min;
  fit.t_max = t_max;
  return fit;
}

}  // namespace subjtime
