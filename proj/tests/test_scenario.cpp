#include <subjtime/csv.hpp>
#include <subjtime/scenario.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace subjtime;

namespace {

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DomainError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scenario, EmptyGivesDefaults) {
  const ScenarioConfig c = parse("");
  EXPECT_EQ(c.alpha, 0.8);
  EXPECT_EQ(c.lambda, 1.0);
  EXPECT_EQ(c.profile.scale.kind(), ScaleFunction::Kind::Linear);
  EXPECT_EQ(c.profile.weight.kind(), WeightFunction::Kind::Constant);
  EXPECT_EQ(c.profile.scale(3.0), 3.0);
  EXPECT_EQ(c.profile.weight(3.0), 1.0);
  EXPECT_GE(c.n_points, 16u);
  EXPECT_EQ(c.forcing.center, 1.0);
  EXPECT_EQ(c.forcing.width, 0.1);
}

TEST(Scenario, FullFile) {
  const ScenarioConfig c = parse(
      "# rapid aging\n"
      "label = rapid_aging\n"
      "alpha = 0.6   # order\n"
      "lambda=2\n"
      "scale = exp:0.8\n"
      "weight = exp:0.5\n"
      "\n"
      "t_min = 1\n t_max = 9\n n_points = 17\n"
      "forcing_center = 3\nforcing_width = 0.2\nforcing_amplitude = -2\n"
      "rel_tol = 1e-8\nabs_tol = 0\ntail_epsilon = 1e-10\n");
  EXPECT_EQ(c.label, "rapid_aging");
  EXPECT_EQ(c.alpha, 0.6);
  EXPECT_EQ(c.lambda, 2.0);
  EXPECT_EQ(c.profile.scale.kind(), ScaleFunction::Kind::Exponential);
  EXPECT_NEAR(c.profile.scale(1.0), std::exp(0.8), 1e-15);
  EXPECT_NEAR(c.profile.weight(2.0), std::exp(1.0), 1e-14);
  const auto g = c.grid();
  ASSERT_EQ(g.size(), 17u);
  EXPECT_EQ(g.front(), 1.0);
  EXPECT_EQ(g.back(), 9.0);
  EXPECT_EQ(c.forcing.amplitude, -2.0);
  EXPECT_EQ(c.quad.rel_tol, 1e-8);
  EXPECT_EQ(c.quad.tail_epsilon, 1e-10);
  EXPECT_EQ(c.model().profile.label, "rapid_aging");
}

TEST(Scenario, ScaleAndWeightSpecs) {
  EXPECT_EQ(parse_scale("linear:2,1")(1.0), 3.0);
  EXPECT_EQ(parse_scale("power:3")(2.0), 10.0);  // t^3 + t
  EXPECT_EQ(parse_scale("power:3,0.5")(2.0), 9.0);
  EXPECT_EQ(parse_weight("constant:2")(5.0), 2.0);
  EXPECT_EQ(parse_weight("power:0.5").kind(), WeightFunction::Kind::PowerPositive);
  EXPECT_THROW(parse_scale("log:1"), DomainError);
  EXPECT_THROW(parse_scale("exp"), DomainError);
  EXPECT_THROW(parse_scale("power:2.5"), DomainError);
  EXPECT_THROW(parse_weight("exp:a"), DomainError);
}

TEST(Scenario, TabulatedScaleRelativeToFile) {
  const auto dir = std::filesystem::temp_directory_path() / "subjtime_scenario_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream t(dir / "psi.csv");
    csv::write_scale(t, ScaleFunction::linear(2.0, 0.0), linspace(-5.0, 5.0, 21));
    std::ofstream s(dir / "s.cfg");
    s << "scale = table:psi.csv\nt_min = -4\nt_max = 4\n";
  }
  const ScenarioConfig c = parse_scenario_file((dir / "s.cfg").string());
  EXPECT_NEAR(c.profile.scale(1.3), 2.6, 1e-12);
  std::filesystem::remove_all(dir);
}

TEST(Scenario, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("\n\nalpha = 1.5\n").find("cfg:3:"), std::string::npos);
  EXPECT_NE(error_of("alpha = 0\n").find("outside (0, 1]"), std::string::npos);
  EXPECT_NE(error_of("# c\ncolour = red\n").find("cfg:2: unknown key 'colour'"), std::string::npos);
  EXPECT_NE(error_of("lambda = fast\n").find("cfg:1: unparsable number"), std::string::npos);
  EXPECT_NE(error_of("lambda = 1x\n").find("cfg:1:"), std::string::npos);
  EXPECT_NE(error_of("n_points = 8\n").find("cfg:1: n_points must be at least 16"), std::string::npos);
  EXPECT_NE(error_of("t_min = 5\nt_max = 1\n").find("cfg:2:"), std::string::npos);
  EXPECT_NE(error_of("scale exp:0.8\n").find("expected `key = value`"), std::string::npos);
  EXPECT_NE(error_of("label = a,b\n").find("cfg:1:"), std::string::npos);
  EXPECT_NE(error_of("forcing_width = -1\n").find("cfg:1:"), std::string::npos);
  EXPECT_THROW(parse_scenario_file("/nonexistent/x.cfg"), DomainError);
}

TEST(Csv, NumberFormat) {
  EXPECT_EQ(csv::num(1.0), "1.00000000000e+00");
  EXPECT_EQ(csv::num(-0.0), "0.00000000000e+00");
  EXPECT_EQ(csv::num(-1.8), "-1.80000000000e+00");
  EXPECT_EQ(csv::num(1.0 / 3.0), "3.33333333333e-01");
}

TEST(Csv, CurvesAndFits) {
  ScenarioCurve c{"standard", KVModel{}, GridFunction::sample({0.0, 1.0}, [](double t) { return cplx(t, -t); })};
  std::ostringstream os;
  csv::write_curves(os, {c});
  EXPECT_EQ(os.str(),
            "t,sigma_re,sigma_im,scenario\n"
            "0.00000000000e+00,0.00000000000e+00,0.00000000000e+00,standard\n"
            "1.00000000000e+00,1.00000000000e+00,-1.00000000000e+00,standard\n");
  DecayFit f;
  f.mode = FitMode::SemiLog;
  f.slope_or_rate = -1.44;
  f.t_min = 5;
  f.t_max = 12;
  std::ostringstream fo;
  csv::write_fit_report(fo, {{"rapid_aging", f}});
  EXPECT_EQ(fo.str(),
            "scenario,mode,slope_or_rate,rms_residual,t_min,t_max\n"
            "rapid_aging,semilog,-1.44000000000e+00,0.00000000000e+00,5.00000000000e+00,1.20000000000e+01\n");
}

TEST(Csv, SpectrumAndGridRoundTrip) {
  std::ostringstream os;
  csv::write_spectrum(os, SpectralGrid({-1.0, 0.0, 1.0}, {cplx(0, 1), cplx(2, 0), cplx(0, -1)}));
  EXPECT_EQ(os.str().substr(0, 9), "xi,re,im\n");

  std::istringstream in("t,re,im\n0,1,2\n1,3,4\n2,5,6\n");
  const GridFunction g = csv::read_grid_function(in);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g.values[2], cplx(5, 6));
  std::istringstream real_only("t,value\r\n0,1\r\n1,2\r\n");
  EXPECT_EQ(csv::read_grid_function(real_only).values[1], cplx(2, 0));
  std::istringstream bad_header("time,re\n0,1\n");
  EXPECT_THROW(csv::read_grid_function(bad_header), DomainError);
  std::istringstream bad_row("t,re\n0,1\n1,x\n");
  try {
    csv::read_grid_function(bad_row, "f.csv");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("f.csv:3"), std::string::npos);
  }
  std::istringstream unsorted("t,re\n1,1\n0,2\n");
  EXPECT_THROW(csv::read_grid_function(unsorted), DomainError);
}
