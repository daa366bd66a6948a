#pragma once
// Invariant suite behind `subjtime_cli selftest`. Each probe returns a
// measured discrepancy and the bound it must stay below.

#include <subjtime/operators.hpp>
#include <subjtime/spectral.hpp>
#include <subjtime/special_fn.hpp>
#include <subjtime/time_geometry.hpp>
#include <subjtime/viscoelastic.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace subjtime::selftest {

struct Measurement {
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
  bool passed() const { return value < threshold; }
};

struct Invariant {
  std::string module;
  std::string name;
  std::function<Measurement()> probe;
};

struct Outcome {
  std::string module;
  std::string name;
  Measurement m;
  bool passed = false;
  double seconds = 0.0;
  std::string error;
};

inline Outcome run(const Invariant& inv) {
  Outcome o{inv.module, inv.name, {}, false, 0.0, {}};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    o.m = inv.probe();
    o.passed = o.m.passed();
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

// ---------------------------------------------------------------------------
// Corpus: subjective Gaussians on the linear/unit, exponential-scale and
// exponential-weight profiles.

inline std::vector<Profile> corpus_profiles() {
  return {standard_profile(),
          {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "exp-scale"},
          {ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"}};
}

/// Profiles whose subjective time covers the real line.
inline std::vector<Profile> full_line_profiles() {
  return {standard_profile(),
          {ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"},
          {ScaleFunction::power(3, 1.0), WeightFunction::power_positive(0.5), "cubic-pow"}};
}

inline double centre(const Profile& p, double offset = 4.0) {
  const double L = p.scale.range_inf();
  return std::isfinite(L) ? L + offset : 0.5;
}

inline std::vector<Signal> corpus_signals(const Profile& p) {
  const double c = centre(p);
  return {subjective_gaussian(p, c, 0.5), subjective_gaussian(p, c + 0.3, 0.4, 1.5, cplx(1.0, -0.5))};
}

/// Lab points whose images are uniform over [c - r, c + r], clipped above the range floor.
inline std::vector<double> lab_points(const Profile& p, double c, double r, std::size_t n) {
  const double L = p.scale.range_inf();
  const double lo = std::isfinite(L) ? std::max(c - r, L + 0.05) : c - r;
  std::vector<double> t;
  for (double s : linspace(lo, c + r, n)) t.push_back(p.scale.inverse(s));
  return t;
}

inline double sup_rel(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den == 0.0 ? (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : num / den;
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// special functions

/// E_{a,a}(-x) through the spectral integral of E_a(-t^a), t = x^(1/a):
/// t^(a-1) E_{a,a}(-t^a) = int_0^inf r e^{-rt} K_a(r) dr,
/// K_a(r) = sin(a pi)/pi r^(a-1) / (r^(2a) + 2 r^a cos(a pi) + 1).
inline double ml_alpha_alpha_integral(double a, double x) {
  const double t = std::pow(x, 1.0 / a), pi = std::numbers::pi;
  auto K = [&](double r) {
    const double ra = std::pow(r, a);
    return std::sin(a * pi) / pi * ra / r / (ra * ra + 2.0 * ra * std::cos(a * pi) + 1.0);
  };
  boost::math::quadrature::exp_sinh<double> es;
  const double I = es.integrate([&](double y) { return y > 0.0 ? y * std::exp(-y) * K(y / t) : 0.0; }, 1e-14);
  return std::pow(t, -1.0 - a) * I;
}

inline Measurement ml_overlap() {
  MLRegimePolicy wide;
  wide.max_extended_digits = 800;
  double worst = 0.0;
  for (double a : {0.3, 0.5, 0.8})
    for (double z : {50.0, 100.0, 200.0}) {
      // the series needs about z^(1/a)/ln 10 digits; beyond the budget the integral stands in
      const bool series_ok = std::pow(z, 1.0 / a) / std::log(10.0) < 700.0;
      const double ref = series_ok ? mittag_leffler_series(a, a, cplx(-z), wide).real() : ml_alpha_alpha_integral(a, z);
      worst = std::max(worst, std::abs(ml_asymptotic_negative(a, a, z, 8) - ref) / std::abs(ref));
    }
  return {worst, 1e-3, "asymptotic vs series/integral, z in [50, 200]"};
}

inline Measurement ml_recurrence() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0.3, 2.0), ub(0.1, 3.0), ur(0.0, 5.0), uth(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = ua(rng), b = ub(rng);
    const cplx z = std::polar(ur(rng), uth(rng));
    const cplx lhs = mittag_leffler(a, b, z);
    const cplx rhs = z * mittag_leffler(a, a + b, z) + reciprocal_gamma(b);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
  }
  return {worst, 1e-10, "100 random (a, b, z), |z| <= 5"};
}

inline Measurement gamma_reciprocity() {
  double worst = 0.0;
  for (double x = -9.95; x < 30.0; x += 0.1) {
    if (detail::is_nonpositive_integer(x)) continue;
    worst = std::max(worst, std::abs(reciprocal_gamma(x) * gamma(x) - 1.0));
  }
  return {worst, 1e-12, "x in [-10, 30]"};
}

inline Measurement ml_monotone() {
  double violations = 0.0;
  for (double a : {0.1, 0.3, 0.5, 0.8, 0.95}) {
    double prev = mittag_leffler(a, a, 0.0);
    for (int k = 1; k <= 200; ++k) {
      const double v = mittag_leffler(a, a, -0.05 * k);
      if (!(v > 0.0 && v < prev)) violations += 1.0;
      prev = v;
    }
  }
  return {violations, 0.5, "sampled violations of E_{a,a}(-x) > 0, decreasing on [0, 10]"};
}

// ---------------------------------------------------------------------------
// time geometry

inline Measurement isometry() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uc(-0.5, 0.5), uw(0.25, 0.6), ufreq(-2.0, 2.0);
  const std::vector<Profile> profiles{standard_profile(),
                                      {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "exp-scale"},
                                      {ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"},
                                      {ScaleFunction::power(3, 1.0), WeightFunction::exponential(0.5), "cubic"}};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto& p = profiles[trial % profiles.size()];
    const double c = uc(rng), w = uw(rng), nu = ufreq(rng);
    auto f = [&](double t) { return std::exp(-(t - c) * (t - c) / (2 * w * w)) * std::polar(1.0, nu * t); };
    const double lo = c - 12 * w, hi = c + 12 * w;
    const auto u = GridFunction::sample(linspace(lo, hi, 20001), f);
    const auto v = conjugate(u, p, linspace(p.scale(lo), p.scale(hi), 20001));
    const double a = weighted_norm_l1(u, p);
    worst = std::max(worst, std::abs(a - l1_norm(v)) / a);
  }
  return {worst, 1e-5, "20 random profile/function pairs"};
}

inline Measurement conjugation_roundtrip() {
  double worst = 0.0;
  for (const auto& p : corpus_profiles()) {
    const auto lab = linspace(-1.5, 1.5, 3001);
    auto f = [](double t) { return cplx(std::exp(-2.0 * t * t) * std::cos(3 * t), 0.5 * std::exp(-t * t)); };
    const auto u = GridFunction::sample(lab, f);
    const auto sg = linspace(p.scale(-1.5), p.scale(1.5), 4001);
    const auto back = conjugate_inverse(conjugate(u, p, sg), p, linspace(-1.4, 1.4, 301));
    for (std::size_t i = 0; i < back.size(); ++i) worst = std::max(worst, std::abs(back.values[i] - f(back.grid[i])));
  }
  return {worst, 1e-7, "sup error of T^-1 T u"};
}

inline Measurement validation_repeatable() {
  double diff = 0.0;
  for (const auto& p : corpus_profiles()) {
    const auto probe = linspace(-2.0, 2.0, 33);
    const double before = p.scale(1.0) + p.weight(1.0);
    const auto a = validate_profile(p, probe), b = validate_profile(p, probe);
    diff += (a.min_dpsi != b.min_dpsi) + (a.min_omega != b.min_omega) + (a.max_inv_omega != b.max_inv_omega) +
            (a.inverse_max_error != b.inverse_max_error) + (a.monotone != b.monotone) +
            (p.scale(1.0) + p.weight(1.0) != before);
  }
  return {diff, 0.5, "differing report fields across repeated calls"};
}

// ---------------------------------------------------------------------------
// operators

inline Measurement left_inverse(const std::vector<double>& orders = {0.3, 0.5, 0.8}) {
  double worst = 0.0;
  for (const Profile& p : corpus_profiles())
    for (const Signal& f : corpus_signals(p))
      for (double a : orders) worst = std::max(worst, left_inverse_check(a, f, lab_points(p, centre(p), 1.5, 7)));
  return {worst, 1e-4, "sup-relative |D^a I^a f - f|"};
}

inline Measurement marchaud_vs_rl() {
  double worst = 0.0;
  for (const Profile& p : corpus_profiles())
    for (const Signal& f : corpus_signals(p))
      for (double a : {0.3, 0.5, 0.8}) {
        std::vector<cplx> m, r;
        for (double t : lab_points(p, centre(p), 1.5, 9)) {
          m.push_back(weyl_derivative_marchaud(a, f, t));
          r.push_back(weyl_derivative_rl(a, f, t));
        }
        worst = std::max(worst, sup_rel(r, m));
      }
  return {worst, 1e-5, "relative to the peak derivative on each signal"};
}

inline Measurement semigroup() {
  QuadratureSpec q;
  q.rel_tol = 1e-9;
  double worst = 0.0;
  for (const Profile& p : corpus_profiles()) {
    const Signal f = corpus_signals(p)[0];
    for (auto [a, b] : {std::pair{0.3, 0.4}, std::pair{0.5, 0.5}}) {
      const Signal Jb = integral_signal(b, f, q);
      std::vector<cplx> lhs, rhs;
      for (double t : lab_points(p, centre(p), 1.5, 6)) {
        lhs.push_back(weyl_integral(a, Jb, t, q));
        rhs.push_back(weyl_integral(a + b, f, t, q));
      }
      worst = std::max(worst, sup_rel(lhs, rhs));
    }
  }
  return {worst, 1e-5, "I^a I^b f vs I^(a+b) f"};
}

inline Measurement eigen_identity(const std::vector<cplx>& lambdas = {1.0, cplx(0.5, 2.0)}) {
  double worst = 0.0;
  for (const Profile& p : full_line_profiles())
    for (cplx lam : lambdas) {
      const Signal e = eigenfunction(p, lam);
      for (double a : {0.3, 0.5, 0.8})
        for (double t : {-1.0, 0.0, 0.7}) {
          const cplx want = std::pow(lam, a) * e(t);
          worst = std::max(worst, std::abs(weyl_derivative_marchaud(a, e, t) - want) / std::abs(want));
        }
    }
  return {worst, 1e-4, "D^a e_lambda vs lambda^a e_lambda"};
}

inline Measurement conjugation_equivalence() {
  double worst = 0.0;
  for (const Profile& p : corpus_profiles()) {
    const Signal f = corpus_signals(p)[0];
    const double L = p.scale.range_inf(), c = centre(p);
    const double s_lo = std::isfinite(L) ? L : c - 4.5, s_hi = c + 4.5;
    std::vector<double> lab;
    for (double s : linspace(s_lo + 1e-9, s_hi, 6001)) lab.push_back(p.scale.inverse(s));
    const GridFunction u = GridFunction::sample(lab, [&f](double t) { return f(t); });
    const GridFunction v = conjugate(u, p, linspace(s_lo + 1e-9, s_hi - 1e-9, 2001));
    const auto ts = lab_points(p, c, 1.5, 9);
    std::vector<double> ss;
    for (double t : ts) ss.push_back(p.scale(t));
    for (double a : {0.3, 0.8}) {
      const GridFunction back = conjugate_inverse(classical_marchaud_on_grid(a, v, ss), p, ts);
      std::vector<cplx> direct;
      for (double t : ts) direct.push_back(weyl_derivative_marchaud(a, f, t));
      worst = std::max(worst, sup_rel(back.values, direct));
    }
  }
  return {worst, 1e-5, "conjugate, classical Marchaud, conjugate back"};
}

inline Measurement linearity() {
  const Profile p{ScaleFunction::power(3, 1.0), WeightFunction::power_positive(0.5), "cubic-pow"};
  const Signal f = subjective_gaussian(p, 0.3, 0.6), g = subjective_gaussian(p, -0.4, 0.9, 2.0);
  const cplx a(1.5, -0.5), b(-0.7, 2.0);
  const Signal h = combine(a, f, b, g);
  double worst = 0.0;
  for (double t : {-0.6, 0.0, 0.5}) {
    const cplx d = a * weyl_derivative_marchaud(0.5, f, t) + b * weyl_derivative_marchaud(0.5, g, t);
    const cplx i = a * weyl_integral(0.5, f, t) + b * weyl_integral(0.5, g, t);
    worst = std::max(worst, std::abs(weyl_derivative_marchaud(0.5, h, t) - d) / std::max(1.0, std::abs(d)));
    worst = std::max(worst, std::abs(weyl_integral(0.5, h, t) - i) / std::max(1.0, std::abs(i)));
  }
  return {worst, 1e-10, "operator(a f + b g) vs a operator(f) + b operator(g)"};
}

// ---------------------------------------------------------------------------
// spectral

inline Measurement plancherel(int pairs = 20) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (const Profile& p : corpus_profiles()) {
    const double c = centre(p, 5.0);
    for (int k = 0; k < pairs; ++k) {
      auto make = [&] {
        return subjective_gaussian(p, c - 0.5 + U(rng), 0.35 + 0.25 * U(rng), -2.0 + 4.0 * U(rng),
                                   std::polar(0.5 + U(rng), 2 * std::numbers::pi * U(rng)));
      };
      const Signal f = make(), g = make();
      const double lo = std::isfinite(p.scale.range_inf()) ? p.scale.range_inf() : c - 8.0;
      worst = std::max(worst, plancherel_check(f, g, lo, c + 8.0, 1601, frequency_grid(24.0, 0.05)).discrepancy());
    }
  }
  return {worst, 1e-6, "|<f,g> - <Tf,Tg>| / (|f||g|) with measure omega^2 psi'"};
}

/// (1/sqrt(2 pi)) int_B^inf s^(-q) e^{-i xi s} ds on a contour rotated to B -+ i y.
inline cplx power_tail_transform(double B, double q, double xi) {
  if (xi == 0.0) return kInvSqrt2Pi * std::pow(B, 1.0 - q) / (q - 1.0);
  const double sg = xi > 0.0 ? 1.0 : -1.0;
  boost::math::quadrature::exp_sinh<double> es;
  auto part = [&](int k) {
    return es.integrate([&](double y) {
      const cplx z = std::pow(cplx(B, -sg * y), -q) * std::exp(-std::abs(xi) * y);
      return k == 0 ? z.real() : z.imag();
    });
  };
  return kInvSqrt2Pi * cplx(0.0, -sg) * std::polar(1.0, -xi * B) * cplx(part(0), part(1));
}

/// forward(D^a u) against (i xi)^a forward(u); D^a u decays like s^(-1-a), so
/// its part beyond s = B enters through its moment expansion.
inline Measurement diagonalization() {
  const Profile p{ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"};
  const double w = 0.5, B = 40.0, pi = std::numbers::pi;
  const Signal u = subjective_gaussian(p, 0.0, w);
  const auto xi = frequency_grid(12.0, 0.05);
  const SpectralGrid U = forward_transform(u, -8.0, 8.0, 1601, xi);
  double worst = 0.0;
  for (double a : {0.3, 0.7}) {
    const Signal Du = derivative_signal(a, u);
    const GridFunction dv = GridFunction::sample(linspace(-8.0, B, 4801), [&](double x) { return Du.subjective(x); });
    SpectralGrid DU = classical_forward(dv, xi);
    const double c = marchaud_constant(a);
    double m = w * std::sqrt(2 * pi), binom = 1.0;
    for (int k = 0; k <= 8; ++k) {
      if (k > 0) binom *= (-1.0 - a - (k - 1)) / k;
      if (k % 2 == 0) {
        for (std::size_t j = 0; j < xi.size(); ++j) DU.values[j] += -c * binom * m * power_tail_transform(B, 1.0 + a + k, xi[j]);
        m *= w * w * (k + 1);
      }
    }
    const Symbol h = frac_power_symbol(a);
    const double peak = U.peak();
    for (std::size_t j = 0; j < xi.size(); ++j) {
      if (std::abs(U.values[j]) <= 1e-6 * peak || xi[j] == 0.0) continue;
      const cplx want = h(xi[j]) * U.values[j];
      worst = std::max(worst, std::abs(DU.values[j] - want) / std::abs(want));
    }
  }
  return {worst, 1e-4, "where |forward(u)| > 1e-6 peak"};
}

/// Spectral multiplier (i xi)^a against the Marchaud derivative.
inline Measurement multiplier_vs_marchaud() {
  double worst = 0.0;
  for (const Profile& p : corpus_profiles()) {
    const double c = centre(p, 5.0);
    const Signal f = subjective_gaussian(p, c, 0.5);
    const GridFunction fg = GridFunction::sample(lab_points(p, c, 6.0, 1201), [&](double x) { return f(x); });
    const auto probe = lab_points(p, c, 1.5, 15);
    const SpectralGrid F = forward_transform(fg, p, frequency_grid(16.0, 0.01));
    for (double a : {0.3, 0.5, 0.8}) {
      const GridFunction d = inverse_transform(F, frac_power_symbol(a), p, probe);
      std::vector<cplx> want;
      for (double x : probe) want.push_back(weyl_derivative_marchaud(a, f, x));
      worst = std::max(worst, sup_rel(d.values, want));
    }
  }
  return {worst, 1e-4, "sup-relative"};
}

inline Measurement convolution_theorem() {
  double worst = 0.0;
  for (const Profile& p : corpus_profiles()) {
    const double c0 = centre(p, 5.0), L = p.scale.range_inf();
    const double cf = std::isfinite(L) ? L + 3.0 : 0.5;
    const Signal fs = subjective_gaussian(p, cf, 0.4, 1.0), gs = subjective_gaussian(p, c0, 0.6, -0.5);
    const GridFunction f = GridFunction::sample(lab_points(p, cf, 2.9, 1201), [&](double x) { return fs(x); });
    const GridFunction g = GridFunction::sample(lab_points(p, c0, 4.5, 1201), [&](double x) { return gs(x); });
    const GridFunction h = weighted_convolution(f, g, p, lab_points(p, cf + c0, 5.5, 1601));
    const auto xi = frequency_grid(14.0, 0.05);
    const SpectralGrid H = forward_transform(h, p, xi), F = forward_transform(f, p, xi), G = forward_transform(g, p, xi);
    double num = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k)
      num = std::max(num, std::abs(H.values[k] - std::sqrt(2 * std::numbers::pi) * F.values[k] * G.values[k]));
    worst = std::max(worst, num / H.peak());
  }
  return {worst, 1e-5, "|forward(f*g) - sqrt(2 pi) Tf Tg| / peak"};
}

// ---------------------------------------------------------------------------
// viscoelastic

inline Measurement kv_cross_validation() {
  double worst = 0.0;
  for (const Profile& p : corpus_profiles()) {
    const KVModel m{0.8, 1.0, p};
    const double c = centre(p, 5.0);
    const Signal f = subjective_gaussian(p, c, 0.5);
    const GridFunction fg = GridFunction::sample(lab_points(p, c, 6.0, 1201), [&](double t) { return f(t); });
    const auto probe = lab_points(p, c - 1.5 + 2.75, 2.75, 23);
    const GridFunction td = solve_kv_timedomain(m, f, probe);
    const GridFunction sp = solve_kv_spectral(m, fg, probe, frequency_grid(16.0, 0.01));
    worst = std::max(worst, sup_rel(sp.values, td.values));
  }
  return {worst, 1e-3, "time-domain vs spectral, sup-relative"};
}

/// kv_residual of the time-domain solution over four grid levels.
inline std::vector<double> kv_residual_levels() {
  std::vector<double> worst(4, 0.0);
  for (const Profile& p : corpus_profiles()) {
    const KVModel m{0.8, 1.0, p};
    const double c = centre(p, 5.0);
    const Signal f = subjective_gaussian(p, c, 0.5);
    const std::size_t sizes[] = {61, 121, 241, 481};
    for (int k = 0; k < 4; ++k) {
      const auto grid = lab_points(p, c - 0.75, 3.75, sizes[k]);
      const GridFunction sigma = solve_kv_timedomain(m, f, grid);
      const GridFunction fg = GridFunction::sample(grid, [&](double t) { return f(t); });
      QuadratureSpec q;
      q.rel_tol = 1e-8;
      worst[k] = std::max(worst[k], kv_residual(sigma, fg, m, q, 16));
    }
  }
  return worst;
}

inline Measurement kv_residual_final() {
  const auto r = kv_residual_levels();
  return {r.back(), 1e-3, "finest of four grid levels"};
}

inline Measurement kv_residual_refinement() {
  const auto r = kv_residual_levels();
  double ratio = 0.0;
  std::string d = "levels";
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i > 0) ratio = std::max(ratio, r[i] / r[i - 1]);
    d += " " + fmt(r[i]);
  }
  return {ratio, 0.5, "worst successive ratio; " + d};
}

/// sigma = e^{mu psi}/omega with forcing (lambda + mu^a) sigma, checked on
/// the solver output; then a subjective Gaussian sigma through the spectral solver.
inline Measurement kv_manufactured() {
  double worst = 0.0;
  for (const Profile& p : full_line_profiles())
    for (double mu : {0.5, 1.5}) {
      const KVModel m{0.8, 1.0, p};
      const Signal sigma = eigenfunction(p, mu);
      const Signal f = combine(m.lambda + std::pow(mu, m.alpha), sigma, 0.0, sigma);
      const auto at = linspace(-1.0, 1.0, 5);
      const GridFunction s = solve_kv_timedomain(m, f, at);
      for (std::size_t i = 0; i < at.size(); ++i)
        worst = std::max(worst, std::abs(s.values[i] - sigma(at[i])) / std::abs(sigma(at[i])));
    }
  const Profile p{ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"};
  const KVModel m{0.6, 1.0, p};
  const Signal sigma = subjective_gaussian(p, 0.0, 0.5);
  const GridFunction f = evaluate_on_grid(linspace(-6.0, 40.0, 4601), [&](double t) {
    return weyl_derivative_marchaud(m.alpha, sigma, t) + m.lambda * sigma(t);
  });
  TransformOptions opt;
  opt.tail_tolerance = 1e-2;  // the forcing's algebraic tail is cut at s = 40, ahead of every probe
  const auto probe = linspace(-1.5, 1.5, 13);
  const GridFunction s = solve_kv_spectral(m, f, probe, frequency_grid(24.0, 0.01), opt);
  std::vector<cplx> want;
  for (double t : probe) want.push_back(sigma(t));
  worst = std::max(worst, sup_rel(s.values, want));
  return {worst, 1e-4, "exponential (time domain) and Gaussian (spectral) solutions"};
}

inline Measurement kernel_asymptotics() {
  const double a = 0.8, lam = 1.0;
  const KVModel m{a, lam, standard_profile()};
  const double C = -1.0 / (lam * lam * gamma(-a));
  return {std::abs(effective_kernel(m, 500.0, 0.0) / (C * std::pow(500.0, -1.0 - a)) - 1.0), 0.05,
          "K(500, 0) / (C 500^-1.8) - 1"};
}

inline Measurement causality() {
  const KVModel m{0.8, 1.0, standard_profile()};
  const auto grid = linspace(-6.0, 6.0, 1201);
  const GridFunction f = GridFunction::sample(grid, [](double t) { return cplx(std::exp(-t * t)); });
  GridFunction g = f;
  const double t_star = 0.5;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] > t_star + 0.05) g.values[i] += cplx(std::sin(3.0 * grid[i]), 1.0);
  const cplx a = solve_kv_timedomain(m, f, {t_star}).values[0];
  const cplx b = solve_kv_timedomain(m, g, {t_star}).values[0];
  return {std::abs(a - b) / std::abs(a), 1e-9, "sigma(t) after changing f beyond t"};
}

inline Measurement positivity() {
  double worst = -1.0;
  for (const auto& sc : figure1_scenarios()) {
    const GridFunction s = solve_kv_timedomain(sc.model, pulse_forcing(sc.model.profile, ForcingSpec{}),
                                               linspace(-1.0, 20.0, 85));
    const double peak = s.sup_norm();
    for (const auto& v : s.values) worst = std::max(worst, -v.real() / peak);
  }
  return {worst, 1e-8, "-min(sigma)/peak for a nonnegative pulse"};
}

// ---------------------------------------------------------------------------

inline std::vector<Invariant> invariants() {
  return {
      {"special_fn", "series_asymptotic_overlap", ml_overlap},
      {"special_fn", "recurrence", ml_recurrence},
      {"special_fn", "reciprocal_gamma_times_gamma", gamma_reciprocity},
      {"special_fn", "ml_positive_decreasing", ml_monotone},
      {"time_geometry", "isometry", isometry},
      {"time_geometry", "conjugation_roundtrip", conjugation_roundtrip},
      {"time_geometry", "validate_profile_repeatable", validation_repeatable},
      {"operators", "left_inverse", [] { return left_inverse(); }},
      {"operators", "marchaud_equals_rl", marchaud_vs_rl},
      {"operators", "semigroup", semigroup},
      {"operators", "conjugation_equivalence", conjugation_equivalence},
      {"operators", "linearity", linearity},
      {"spectral", "unitarity", [] { return plancherel(); }},
      {"spectral", "diagonalization", diagonalization},
      {"spectral", "damped_eigenfunction", [] { return eigen_identity({cplx(0.5, 2.0), cplx(0.2, -1.0)}); }},
      {"spectral", "convolution_sqrt_2pi", convolution_theorem},
      {"viscoelastic", "cross_validation", kv_cross_validation},
      {"viscoelastic", "residual", kv_residual_final},
      {"viscoelastic", "residual_refinement", kv_residual_refinement},
      {"viscoelastic", "kernel_asymptotics", kernel_asymptotics},
      {"viscoelastic", "causality", causality},
      {"viscoelastic", "positivity", positivity},
  };
}

}  // namespace subjtime::selftest
