#pragma once

// Input functions for the operators. A Signal knows its laboratory-time
// values f(t), its conjugated form v(u) = omega(psi^{-1}(u)) f(psi^{-1}(u))
// for the profile it was built against, and a decay window in subjective
// time outside which v is negligible.

#include <subjtime/errors.hpp>
#include <subjtime/interp.hpp>
#include <subjtime/time_geometry.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>

namespace subjtime {

/// Subjective-time support of a signal at tolerance eps: |v(u)| <= eps * peak
/// for u < lo and u > hi. `peak` is the magnitude eps is relative to.
struct Window {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double peak = 0.0;
};

class Signal {
 public:
  using Fn = std::function<cplx(double)>;
  using WindowFn = std::function<Window(double S, double eps)>;

  Signal(Profile p, Fn lab, Fn subjective, WindowFn window)
      : profile_(std::move(p)), lab_(std::move(lab)), subj_(std::move(subjective)), window_(std::move(window)) {}

  /// Signal from a lab-time callable; the conjugated form goes through psi^{-1}.
  static Signal from_callable(const Profile& p, Fn f, WindowFn window) {
    const Profile pc = p;
    Fn subj = [pc, f](double u) {
      const double t = pc.scale.inverse(u);
      return pc.weight(t) * f(t);
    };
    return Signal(p, std::move(f), std::move(subj), std::move(window));
  }

  /// Interpolated samples; zero outside the grid span.
  static Signal from_grid(const Profile& p, const GridFunction& g) {
    g.validate();
    auto interp = std::make_shared<const ComplexCubic>(g.grid, g.values);
    const double t0 = g.grid.front(), t1 = g.grid.back();
    const double s0 = p.scale(t0), s1 = p.scale(t1);
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) peak = std::max(peak, std::abs(g.values[i]) * p.weight(g.grid[i]));
    const Profile pc = p;
    Fn lab = [interp, t0, t1](double t) { return (t < t0 || t > t1) ? cplx(0.0) : (*interp)(t); };
    Fn subj = [interp, pc, t0, t1, s0, s1](double u) {
      if (u < s0 || u > s1) return cplx(0.0);
      const double t = std::clamp(pc.scale.inverse(u), t0, t1);
      return pc.weight(t) * (*interp)(t);
    };
    WindowFn w = [s0, s1, peak](double, double) { return Window{s0, s1, peak}; };
    return Signal(p, std::move(lab), std::move(subj), std::move(w));
  }

  const Profile& profile() const { return profile_; }
  cplx operator()(double t) const { return lab_(t); }
  cplx lab(double t) const { return lab_(t); }
  cplx subjective(double u) const { return subj_(u); }
  Window window(double S, double eps) const { return window_(S, eps); }

  /// a f + b g (same profile).
  friend Signal combine(cplx a, const Signal& f, cplx b, const Signal& g) {
    Fn lab = [a, b, f, g](double t) { return a * f.lab(t) + b * g.lab(t); };
    Fn subj = [a, b, f, g](double u) { return a * f.subjective(u) + b * g.subjective(u); };
    WindowFn w = [a, b, f, g](double S, double eps) {
      const Window wf = f.window(S, eps), wg = g.window(S, eps);
      return Window{std::min(wf.lo, wg.lo), std::max(wf.hi, wg.hi),
                    std::max(std::abs(a) * wf.peak, std::abs(b) * wg.peak)};
    };
    return Signal(f.profile_, std::move(lab), std::move(subj), std::move(w));
  }

 private:
  Profile profile_;
  Fn lab_, subj_;
  WindowFn window_;
};

/// f(t) = (A/omega(t)) exp(-(psi(t)-c)^2 / (2 w^2)) exp(i nu psi(t)): a Gaussian
/// in subjective time, the test class used throughout.
inline Signal subjective_gaussian(const Profile& p, double center, double width, double nu = 0.0,
                                  cplx amplitude = 1.0) {
  if (!(width > 0.0)) throw DomainError("subjective_gaussian: width must be positive");
  auto v = [=](double u) {
    const double d = (u - center) / width;
    return amplitude * std::exp(-0.5 * d * d) * std::polar(1.0, nu * u);
  };
  const Profile pc = p;
  Signal::Fn lab = [pc, v](double t) { return v(pc.scale(t)) / pc.weight(t); };
  Signal::WindowFn w = [=](double, double eps) {
    const double r = width * std::sqrt(2.0 * std::log(1.0 / eps));
    return Window{center - r, center + r, std::abs(amplitude)};
  };
  return Signal(p, std::move(lab), v, std::move(w));
}

/// e_lambda(t) = exp(lambda psi(t)) / omega(t) with Re lambda > 0; decays into
/// the past, so the window is relative to |v(S)|.
inline Signal eigenfunction(const Profile& p, cplx lambda) {
  if (!(lambda.real() > 0.0)) throw DomainError("eigenfunction: Re(lambda) must be positive");
  auto v = [lambda](double u) { return std::exp(lambda * u); };
  const Profile pc = p;
  Signal::Fn lab = [pc, v](double t) { return v(pc.scale(t)) / pc.weight(t); };
  Signal::WindowFn w = [lambda](double S, double eps) {
    return Window{S - std::log(1.0 / eps) / lambda.real(), std::numeric_limits<double>::infinity(),
                  std::exp(lambda.real() * S)};
  };
  return Signal(p, std::move(lab), v, std::move(w));
}

/// The zero function.
inline Signal zero_signal(const Profile& p) {
  Signal::Fn z = [](double) { return cplx(0.0); };
  Signal::WindowFn w = [](double S, double) { return Window{S, S, 0.0}; };
  return Signal(p, z, z, std::move(w));
}

}  // namespace subjtime
