#include <subjtime/time_geometry.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>

using namespace subjtime;

TEST(Scale, Linear) {
  const auto s = ScaleFunction::linear(1.0, 0.0);
  EXPECT_EQ(s(2.5), 2.5);
  EXPECT_EQ(s.deriv(-4.0), 1.0);
  EXPECT_EQ(s.inverse(7.0), 7.0);
  EXPECT_TRUE(std::isinf(s.range_inf()) && s.range_inf() < 0);
  EXPECT_THROW(ScaleFunction::linear(0.0, 1.0), DomainError);
  EXPECT_THROW(ScaleFunction::linear(-2.0, 1.0), DomainError);
}

TEST(Scale, Exponential) {
  const auto s = ScaleFunction::exponential(0.8);
  EXPECT_NEAR(s(2.0), 4.953032424395115, 1e-14);
  EXPECT_EQ(s.range_inf(), 0.0);
  EXPECT_NEAR(s.inverse(s(1.3)), 1.3, 1e-14);
  EXPECT_NEAR(s.deriv(1.0), 0.8 * std::exp(0.8), 1e-14);
  EXPECT_THROW(s.inverse(0.0), DomainError);
  EXPECT_THROW(ScaleFunction::exponential(0.0), DomainError);
}

TEST(Scale, Power) {
  const auto s = ScaleFunction::power(3, 1.0);
  EXPECT_EQ(s(2.0), 10.0);
  EXPECT_EQ(s.deriv(0.0), 1.0);
  for (double t : {-7.3, -1.0, -0.01, 0.0, 0.3, 2.0, 40.0}) EXPECT_NEAR(s.inverse(s(t)), t, 1e-12 * (1 + std::abs(t)));
  EXPECT_THROW(ScaleFunction::power(2, 1.0), DomainError);
  EXPECT_THROW(ScaleFunction::power(3, -1.0), DomainError);
}

TEST(Scale, TabulatedMatchesSource) {
  std::vector<double> t, psi;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(-2.0 + 0.02 * i);
    psi.push_back(std::exp(0.8 * t.back()));
  }
  const auto s = ScaleFunction::tabulated(t, psi);
  EXPECT_NEAR(s(0.511), std::exp(0.8 * 0.511), 1e-8);
  EXPECT_NEAR(s.deriv(0.511), 0.8 * std::exp(0.8 * 0.511), 1e-6);
  EXPECT_NEAR(s.inverse(s(0.511)), 0.511, 1e-12);
  EXPECT_EQ(s.range_inf(), psi.front());
  EXPECT_THROW(s(5.0), DomainError);
  EXPECT_THROW(s.inverse(100.0), DomainError);
}

TEST(Scale, TabulatedRejectsBadSamples) {
  EXPECT_THROW(ScaleFunction::tabulated({0, 1, 2}, {0, 1, 2}), DomainError);
  EXPECT_THROW(ScaleFunction::tabulated({0, 1, 2, 3, 4, 5, 6, 7}, {0, 1, 2, 3, 3, 5, 6, 7}), DomainError);
}

TEST(Scale, FromCsv) {
  const std::string path = testing::TempDir() + "scale.csv";
  {
    std::ofstream out(path);
    out << "t,psi\n";
    for (int i = 0; i < 10; ++i) out << i << "," << 2 * i + 1 << "\n";
  }
  const auto s = ScaleFunction::from_csv(path);
  EXPECT_NEAR(s(3.5), 8.0, 1e-12);
  {
    std::ofstream out(path);
    out << "time,psi\n0,1\n";
  }
  EXPECT_THROW(ScaleFunction::from_csv(path), DomainError);
  std::remove(path.c_str());
}

TEST(Weight, Kinds) {
  EXPECT_EQ(WeightFunction::constant(1.0)(123.0), 1.0);
  EXPECT_NEAR(WeightFunction::exponential(0.5)(2.0), std::exp(1.0), 1e-15);
  EXPECT_EQ(WeightFunction::power_positive(-1.0)(0.0), 1.0);
  EXPECT_NEAR(WeightFunction::power_positive(-1.0)(2.0), 0.2, 1e-15);
  EXPECT_THROW(WeightFunction::constant(0.0), DomainError);
  EXPECT_THROW(WeightFunction::constant(-1.0), DomainError);
}

namespace {

std::vector<Profile> sample_profiles() {
  return {
      standard_profile(),
      {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "exp-scale"},
      {ScaleFunction::linear(1.0, 0.0), WeightFunction::exponential(0.5), "exp-weight"},
      {ScaleFunction::power(3, 1.0), WeightFunction::exponential(0.5), "cubic"},
      {ScaleFunction::linear(2.0, -1.0), WeightFunction::power_positive(-1.0), "rational"},
  };
}

}  // namespace

TEST(Conjugation, IdentityForStandardProfile) {
  const auto p = standard_profile();
  const auto g = linspace(-6.0, 6.0, 1201);
  const auto u = GridFunction::sample(g, [](double t) { return cplx(std::exp(-t * t / 2), std::sin(t)); });
  const auto sg = linspace(-5.0, 5.0, 777);
  const auto v = conjugate(u, p, sg);
  for (std::size_t i = 0; i < sg.size(); ++i) {
    const double t = sg[i];
    EXPECT_LT(std::abs(v.values[i] - cplx(std::exp(-t * t / 2), std::sin(t))), 1e-8);
  }
}

TEST(Conjugation, InverseOfStructuredFunctionIsExact) {
  // u = (1/omega) g(psi)  =>  T u = g, here applied through conjugate_inverse
  for (const auto& p : sample_profiles()) {
    const auto sg = linspace(p.scale(-1.0), p.scale(1.5), 2001);
    auto gfun = [](double s) { return cplx(std::exp(-(s - 1.0) * (s - 1.0)), 0.0); };
    const auto v = GridFunction::sample(sg, gfun);
    const auto lab = linspace(-1.0, 1.5, 300);
    const auto u = conjugate_inverse(v, p, lab);
    for (std::size_t i = 0; i < lab.size(); ++i)
      EXPECT_LT(std::abs(u.values[i] * p.weight(lab[i]) - gfun(p.scale(lab[i]))), 1e-8) << p.label;
  }
}

TEST(Conjugation, RoundTrip) {
  for (const auto& p : sample_profiles()) {
    const auto lab = linspace(-1.5, 1.5, 3001);
    auto f = [](double t) { return cplx(std::exp(-2.0 * t * t) * std::cos(3 * t), 0.5 * std::exp(-t * t)); };
    const auto u = GridFunction::sample(lab, f);
    const auto sg = linspace(p.scale(-1.5), p.scale(1.5), 4001);
    const auto back = conjugate_inverse(conjugate(u, p, sg), p, linspace(-1.4, 1.4, 301));
    double err = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i) err = std::max(err, std::abs(back.values[i] - f(back.grid[i])));
    EXPECT_LT(err, 1e-7) << p.label;
  }
}

TEST(Conjugation, OutOfRangeThrows) {
  const auto p = standard_profile();
  const auto u = GridFunction::sample(linspace(0.0, 1.0, 11), [](double t) { return cplx(t); });
  EXPECT_THROW(conjugate(u, p, {0.5, 2.0}), DomainError);
  EXPECT_THROW(conjugate_inverse(u, p, {-1.0}), DomainError);
}

TEST(WeightedNorm, ZeroAndUnitBump) {
  const auto p = standard_profile();
  const auto g = linspace(-10.0, 10.0, 4001);
  EXPECT_EQ(weighted_norm_l1(GridFunction::sample(g, [](double) { return cplx(0.0); }), p), 0.0);
  const auto bump = GridFunction::sample(g, [](double t) { return cplx(std::exp(-t * t) / std::sqrt(M_PI)); });
  EXPECT_NEAR(weighted_norm_l1(bump, p), 1.0, 1e-10);
}

TEST(WeightedNorm, IsometryOnRandomPairs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uc(-0.5, 0.5), uw(0.25, 0.6), ufreq(-2.0, 2.0);
  const auto profiles = sample_profiles();
  for (int trial = 0; trial < 20; ++trial) {
    const auto& p = profiles[trial % profiles.size()];
    const double c = uc(rng), w = uw(rng), nu = ufreq(rng);
    auto f = [&](double t) { return std::exp(-(t - c) * (t - c) / (2 * w * w)) * std::polar(1.0, nu * t); };
    const double lo = c - 12 * w, hi = c + 12 * w;
    const auto u = GridFunction::sample(linspace(lo, hi, 20001), f);
    const auto v = conjugate(u, p, linspace(p.scale(lo), p.scale(hi), 20001));
    const double a = weighted_norm_l1(u, p), b = l1_norm(v);
    EXPECT_LT(std::abs(a - b) / a, 1e-5) << p.label << " trial " << trial;
  }
}

TEST(Validation, Reports) {
  const auto probe = linspace(-3.0, 3.0, 61);
  const auto std_r = validate_profile(standard_profile(), probe);
  EXPECT_TRUE(std_r.passed());
  EXPECT_FALSE(std_r.finite_range_inf);

  const Profile expo{ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "exp"};
  const auto er = validate_profile(expo, probe);
  EXPECT_TRUE(er.monotone);
  EXPECT_TRUE(er.derivative_positive());
  EXPECT_TRUE(er.finite_range_inf);

  std::vector<double> t, psi;
  for (int i = -10; i <= 10; ++i) {
    t.push_back(0.2 * i);
    psi.push_back(t.back() * t.back() * t.back());
  }
  const Profile cube{ScaleFunction::tabulated(t, psi), WeightFunction::constant(1.0), "cube"};
  const auto cr = validate_profile(cube, linspace(-2.0, 2.0, 41));
  EXPECT_FALSE(cr.derivative_positive());
  EXPECT_FALSE(cr.passed());

  const Profile cube_lin{ScaleFunction::power(3, 1.0), WeightFunction::constant(1.0), "t3+t"};
  EXPECT_TRUE(validate_profile(cube_lin, probe).passed());
  const Profile cube_pure{ScaleFunction::power(3, 0.0), WeightFunction::constant(1.0), "t3"};
  EXPECT_FALSE(validate_profile(cube_pure, probe).derivative_positive());
}

TEST(Validation, RepeatableAndNonMutating) {
  const Profile p{ScaleFunction::power(3, 1.0), WeightFunction::power_positive(-1.0), "p"};
  const auto probe = linspace(-2.0, 2.0, 33);
  const auto a = validate_profile(p, probe);
  const auto b = validate_profile(p, probe);
  EXPECT_EQ(a.min_dpsi, b.min_dpsi);
  EXPECT_EQ(a.max_inv_omega, b.max_inv_omega);
  EXPECT_EQ(a.inverse_max_error, b.inverse_max_error);
  EXPECT_EQ(p.scale(1.0), 2.0);
  EXPECT_THROW(validate_profile(p, {}), DomainError);
}

TEST(GridFunctionTest, Invariants) {
  EXPECT_THROW(GridFunction({0.0, 0.0}, {1.0, 2.0}), DomainError);
  EXPECT_THROW(GridFunction({0.0, 1.0}, {1.0}), DomainError);
  EXPECT_THROW(GridFunction({0.0, 1.0}, {1.0, cplx(NAN, 0)}), DomainError);
}
