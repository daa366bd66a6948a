#include <subjtime/viscoelastic.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace subjtime;

namespace {

std::vector<Profile> corpus_profiles() {
  return {standard_profile(),
          {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "exp-scale"},
          {ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"}};
}

double centre(const Profile& p) { return std::isfinite(p.scale.range_inf()) ? p.scale.range_inf() + 5.0 : 0.5; }

std::vector<double> lab_grid(const Profile& p, double lo, double hi, std::size_t n) {
  const double L = p.scale.range_inf();
  if (std::isfinite(L)) lo = std::max(lo, L + 0.05);
  std::vector<double> t;
  for (double s : linspace(lo, hi, n)) t.push_back(p.scale.inverse(s));
  return t;
}

double sup_rel(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

TEST(Greens, Values) {
  for (double a : {0.3, 0.8}) {
    const double s = 1e-40;
    EXPECT_NEAR(greens_lag_kernel(a, 1.0, s) / (std::pow(s, a - 1.0) / std::tgamma(a)), 1.0, 1e-10);
  }
  EXPECT_NEAR(greens_lag_kernel(1.0, 1.0, 1.0), 0.36787944117144233, 1e-15);
  EXPECT_NEAR(greens_lag_kernel(0.8, 1.0, 1.0), 0.25574384475824187, 1e-14);
  EXPECT_THROW(greens_lag_kernel(0.8, 1.0, 0.0), DomainError);
  EXPECT_THROW(greens_lag_kernel(0.8, 1.0, -2.0), DomainError);
}

TEST(Greens, TableMatchesDirect) {
  std::mt19937_64 rng(7);
  for (double a : {0.3, 0.5, 0.8, 0.95}) {
    const auto K = LagKernel::get(a);
    std::uniform_real_distribution<double> U(0.0, 1.5 * K->table_end());
    for (int i = 0; i < 100; ++i) {
      const double x = U(rng);
      const double d = mittag_leffler(a, a, -x);
      EXPECT_LT(std::abs(K->phi(x) - d), 1e-12 * std::abs(d)) << a << " " << x;
    }
    EXPECT_NEAR((*K)(2.0, 0.7), greens_lag_kernel(a, 2.0, 0.7), 1e-12);
  }
}

TEST(EffectiveKernel, Compositions) {
  const KVModel std_m{0.8, 1.0, standard_profile()};
  EXPECT_DOUBLE_EQ(effective_kernel(std_m, 3.0, 0.0), greens_lag_kernel(0.8, 1.0, 3.0));
  const KVModel classical{1.0, 1.0, standard_profile()};
  EXPECT_NEAR(effective_kernel(classical, 2.5, 0.0), std::exp(-2.5), 1e-15);
  const KVModel aging{0.8, 1.0, {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "exp"}};
  EXPECT_NEAR(effective_kernel(aging, 2.0, 0.0), greens_lag_kernel(0.8, 1.0, std::exp(1.6) - 1.0), 1e-15);
  EXPECT_THROW(effective_kernel(std_m, 1.0, 1.0), DomainError);
  EXPECT_THROW(effective_kernel(std_m, 1.0, 2.0), DomainError);
}

TEST(EffectiveKernel, PowerLawConstantAt500) {
  const double a = 0.8, lam = 1.0;
  const KVModel m{a, lam, standard_profile()};
  const double C = -1.0 / (lam * lam * std::tgamma(-a));
  EXPECT_LT(std::abs(effective_kernel(m, 500.0, 0.0) / (C * std::pow(500.0, -1.0 - a)) - 1.0), 0.05);
}

TEST(Amnesia, CaseIPowerLaw) {
  const KVModel m{0.8, 1.0, standard_profile()};
  std::vector<double> t;
  for (int i = 0; i < 40; ++i) t.push_back(50.0 * std::pow(10.0, i / 39.0));
  const DecayFit fit = amnesia_fit(m, t, FitMode::LogLog);
  EXPECT_NEAR(fit.slope_or_rate, -1.8, 0.05);
  EXPECT_EQ(fit.t_min, 50.0);
  EXPECT_NEAR(fit.t_max, 500.0, 1e-9);
  EXPECT_GE(fit.rms_residual, 0.0);
}

TEST(Amnesia, CaseIIExponential) {
  const KVModel m{0.8, 1.0, {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "exp"}};
  const DecayFit fit = amnesia_fit(m, linspace(5.0, 12.0, 30), FitMode::SemiLog);
  EXPECT_NEAR(fit.slope_or_rate, -1.44, 0.05);
}

TEST(Amnesia, ClassicalRateIsLambda) {
  const KVModel m{1.0, 2.0, standard_profile()};
  EXPECT_NEAR(amnesia_fit(m, linspace(1.0, 10.0, 20), FitMode::SemiLog).slope_or_rate, -2.0, 1e-12);
}

TEST(Amnesia, Errors) {
  const KVModel m{0.8, 1.0, standard_profile()};
  EXPECT_THROW(amnesia_fit(m, linspace(50.0, 500.0, 9), FitMode::LogLog), DomainError);
  const KVModel aging{0.8, 1.0, {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "exp"}};
  EXPECT_THROW(amnesia_fit(aging, linspace(600.0, 700.0, 12), FitMode::SemiLog), ConvergenceError);
  std::vector<double> x = linspace(1.0, 10.0, 12), y(12, 1.0);
  EXPECT_THROW(fit_decay(x, y, FitMode::SemiLog), DomainError);
  EXPECT_EQ(parse_fit_mode("loglog"), FitMode::LogLog);
  EXPECT_THROW(parse_fit_mode("linear"), DomainError);
}

TEST(TimeDomain, StandardMatchesDirectQuadrature) {
  const KVModel m{0.8, 1.0, standard_profile()};
  const Signal f = subjective_gaussian(m.profile, 0.0, 0.6);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double t : {-1.0, -0.2, 0.4, 1.5, 4.0}) {
    auto integrand = [&](double u) {
      return greens_lag_kernel(0.8, 1.0, t - u) * std::exp(-u * u / 0.72);
    };
    const double want = ts.integrate(integrand, -9.0, t);
    EXPECT_NEAR(solve_kv_point(m, f, t).value.real(), want, 1e-9 * std::abs(want)) << t;
  }
}

TEST(TimeDomain, ZeroForcing) {
  const KVModel m{0.8, 1.0, standard_profile()};
  const GridFunction z = solve_kv_timedomain(m, zero_signal(m.profile), linspace(-1.0, 3.0, 9));
  for (const auto& v : z.values) EXPECT_EQ(v, cplx(0.0));
}

TEST(TimeDomain, ManufacturedExponential) {
  for (const Profile& p :
       {standard_profile(), Profile{ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"},
        Profile{ScaleFunction::power(3, 1.0), WeightFunction::power_positive(0.5), "cubic-pow"}})
    for (double mu : {0.5, 1.5}) {
      const KVModel m{0.8, 1.0, p};
      const Signal sigma = eigenfunction(p, mu);
      const double k = m.lambda + std::pow(mu, m.alpha);
      const Signal fm = combine(k, sigma, 0.0, sigma);
      const auto at = linspace(-1.0, 1.0, 5);
      const GridFunction s = solve_kv_timedomain(m, fm, at);
      for (std::size_t i = 0; i < at.size(); ++i)
        EXPECT_LT(std::abs(s.values[i] - sigma(at[i])), 1e-8 * std::abs(sigma(at[i]))) << p.label << mu;
      EXPECT_LT(kv_residual(solution_signal(m, fm), fm, m, {-0.5, 0.5}), 1e-4) << p.label;
    }
}

TEST(TimeDomain, Causality) {
  const KVModel m{0.8, 1.0, standard_profile()};
  const auto grid = linspace(-6.0, 6.0, 1201);
  const GridFunction f = GridFunction::sample(grid, [](double t) { return cplx(std::exp(-t * t)); });
  GridFunction g = f;
  const double t_star = 0.5;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] > t_star + 0.05) g.values[i] += cplx(std::sin(3.0 * grid[i]), 1.0);
  const double a = solve_kv_timedomain(m, f, {t_star}).values[0].real();
  const double b = solve_kv_timedomain(m, g, {t_star}).values[0].real();
  EXPECT_NEAR(a, b, 1e-9 * std::abs(a));
}

TEST(TimeDomain, PositivityForNonnegativeForcing) {
  for (const auto& sc : figure1_scenarios()) {
    const Signal f = pulse_forcing(sc.model.profile, ForcingSpec{});
    const GridFunction s = solve_kv_timedomain(sc.model, f, linspace(-1.0, 20.0, 85));
    const double peak = s.sup_norm();
    for (const auto& v : s.values) EXPECT_GE(v.real(), -1e-8 * peak) << sc.label;
  }
}

TEST(TimeDomain, ClassicalLimitMatchesOde) {
  const double lam = 1.3;
  const KVModel m{1.0, lam, standard_profile()};
  const ForcingSpec spec{1.0, 0.1, 1.0};
  const Signal f = pulse_forcing(m.profile, spec);
  using state = std::vector<double>;
  auto rhs = [&](const state& x, state& dx, double t) { dx[0] = -lam * x[0] + f(t).real(); };
  const std::vector<double> times{0.0, 0.8, 1.0, 1.2, 2.0, 4.0, 8.0};
  std::vector<double> ode;
  state x{0.0};
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<state>());
  std::vector<double> obs_t{-2.0};
  obs_t.insert(obs_t.end(), times.begin(), times.end());
  odeint::integrate_times(stepper, rhs, x, obs_t.begin(), obs_t.end(), 1e-3,
                          [&](const state& s, double) { ode.push_back(s[0]); });
  const GridFunction s = solve_kv_timedomain(m, f, times);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(s.values[i].real(), ode[i + 1], 1e-9) << times[i];
  // after the pulse the response relaxes as exp(-lambda t)
  EXPECT_NEAR(s.values[6].real() / s.values[5].real(), std::exp(-4.0 * lam), 1e-9);
}

TEST(Spectral, AgreesWithTimeDomain) {
  for (const Profile& p : corpus_profiles()) {
    const KVModel m{0.8, 1.0, p};
    const double c = centre(p);
    const Signal f = subjective_gaussian(p, c, 0.5);
    const GridFunction fg = GridFunction::sample(lab_grid(p, c - 6.0, c + 6.0, 1201), [&](double t) { return f(t); });
    const auto probe = lab_grid(p, c - 1.5, c + 4.0, 23);
    const GridFunction td = solve_kv_timedomain(m, f, probe);
    const GridFunction sp = solve_kv_spectral(m, fg, probe, frequency_grid(16.0, 0.01));
    EXPECT_LT(sup_rel(sp.values, td.values), 1e-3) << p.label;
  }
}

TEST(Spectral, ZeroForcing) {
  const KVModel m{0.5, 1.0, standard_profile()};
  const GridFunction z = GridFunction::sample(linspace(-5.0, 5.0, 201), [](double) { return cplx(0.0); });
  const GridFunction s = solve_kv_spectral(m, z, {0.0, 1.0}, frequency_grid(5.0, 0.05));
  for (const auto& v : s.values) EXPECT_EQ(v, cplx(0.0));
}

TEST(Spectral, ManufacturedGaussian) {
  // sigma is a subjective Gaussian, f = D^a sigma + lambda sigma; the forcing's
  // slow right tail is cut at s = c + 40, which cannot reach sigma for s < c + 40
  const Profile p{ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"};
  const KVModel m{0.6, 1.0, p};
  const Signal sigma = subjective_gaussian(p, 0.0, 0.5);
  const auto grid = linspace(-6.0, 40.0, 4601);
  GridFunction f = evaluate_on_grid(grid, [&](double t) {
    return weyl_derivative_marchaud(m.alpha, sigma, t) + m.lambda * sigma(t);
  });
  TransformOptions opt;
  opt.tail_tolerance = 1e-2;
  const auto probe = linspace(-1.5, 1.5, 13);
  const GridFunction s = solve_kv_spectral(m, f, probe, frequency_grid(24.0, 0.01), opt);
  std::vector<cplx> want;
  for (double t : probe) want.push_back(sigma(t));
  EXPECT_LT(sup_rel(s.values, want), 1e-4);
}

TEST(Residual, ZeroIsZero) {
  const KVModel m{0.8, 1.0, standard_profile()};
  const GridFunction z = GridFunction::sample(linspace(-2.0, 2.0, 41), [](double) { return cplx(0.0); });
  EXPECT_EQ(kv_residual(z, z, m), 0.0);
}

TEST(Residual, RefinementConverges) {
  for (const auto& sc : figure1_scenarios()) {
    const KVModel& m = sc.model;
    const Signal f = subjective_gaussian(m.profile, centre(m.profile), 0.5);
    const double c = centre(m.profile);
    std::vector<double> res;
    for (std::size_t n : {61, 121, 241, 481}) {
      const auto grid = lab_grid(m.profile, c - 4.5, c + 3.0, n);
      const GridFunction sigma = solve_kv_timedomain(m, f, grid);
      const GridFunction fg = GridFunction::sample(grid, [&](double t) { return f(t); });
      QuadratureSpec q;
      q.rel_tol = 1e-8;
      res.push_back(kv_residual(sigma, fg, m, q, 16));
    }
    for (std::size_t i = 1; i < res.size(); ++i) EXPECT_LE(2.0 * res[i], res[i - 1]) << sc.label << " level " << i;
    EXPECT_LT(res.back(), 1e-3) << sc.label;
  }
}

TEST(Relaxation, ZeroForcingGivesZeroCurves) {
  ForcingSpec none;
  none.amplitude = 0.0;
  const auto curves = relaxation_experiment(figure1_scenarios(), none, linspace(0.0, 10.0, 11));
  ASSERT_EQ(curves.size(), 3u);
  for (const auto& c : curves)
    for (const auto& v : c.sigma.values) EXPECT_EQ(v, cplx(0.0));
  EXPECT_THROW(relaxation_experiment({}, ForcingSpec{}, {1.0}), DomainError);
}

TEST(Relaxation, FigureOneTails) {
  const ForcingSpec forcing;
  const auto scen = figure1_scenarios();
  std::vector<double> grid = linspace(0.0, 12.0, 241);
  for (int i = 1; i < 60; ++i) grid.push_back(12.0 * std::pow(50.0, i / 59.0));
  const auto curves = relaxation_experiment(scen, forcing, grid);
  const DecayFit standard = curve_tail_fit(curves[0], forcing, FitMode::LogLog, 50.0, 500.0);
  EXPECT_NEAR(standard.slope_or_rate, -1.8, 0.05);
  EXPECT_EQ(standard.t_min, 50.0);
  const DecayFit aging = curve_tail_fit(curves[1], forcing, FitMode::SemiLog, 5.0, 12.0);
  EXPECT_NEAR(aging.slope_or_rate, -1.44, 0.05);
  const DecayFit damped = curve_tail_fit(curves[2], forcing, FitMode::LogLog, 50.0, 500.0);
  EXPECT_NEAR(damped.slope_or_rate, standard.slope_or_rate, 1e-6);
  // same subjective tail, strongly damped lab-time envelope
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] > 3.0) {
      EXPECT_LT(std::abs(curves[2].sigma.values[i]), 0.25 * std::abs(curves[0].sigma.values[i]));
    }
}
