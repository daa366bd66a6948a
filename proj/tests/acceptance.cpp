// Acceptance run: one PASS/FAIL line per criterion, with the measured value,
// its bound and the wall time. argv[1] is the path of subjtime_cli.

#include <subjtime/csv.hpp>
#include <subjtime/selftest.hpp>
#include <subjtime/special_fn.hpp>
#include <subjtime/viscoelastic.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace subjtime;
namespace fs = std::filesystem;

namespace {

struct RefRow {
  const char* tag;
  double alpha, beta, z_re, z_im, v_re, v_im;
};

const RefRow kRows[] = {
#include "data/ml_reference.inc"
};

struct Result {
  bool ok = false;
  std::string what;
};

int failures = 0;

void report(int id, const char* name, double time_limit, const std::function<Result()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0.0 && dt > time_limit) {
    r.ok = false;
    r.what += "; over the " + selftest::fmt(time_limit) + " s budget";
  }
  std::printf("%s [%02d] %s: %s (%.2f s)\n", r.ok ? "PASS" : "FAIL", id, name, r.what.c_str(), dt);
  std::fflush(stdout);
  failures += !r.ok;
}

Result below(const selftest::Measurement& m) {
  return {m.passed(), selftest::fmt(m.value) + " < " + selftest::fmt(m.threshold)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<double> log_samples(double a, double b, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
  t.back() = b;
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  report(1, "Mittag-Leffler accuracy on the series-oracle grid", 10.0, [] {
    double worst = 0.0;
    int n = 0;
    for (const auto& r : kRows) {
      if (std::string(r.tag) != "grid") continue;
      const cplx got = mittag_leffler(r.alpha, r.beta, cplx(r.z_re, r.z_im));
      worst = std::max(worst, std::abs(got - cplx(r.v_re, r.v_im)) / std::abs(cplx(r.v_re, r.v_im)));
      ++n;
    }
    return Result{n == 200 && worst < 1e-10,
                  std::to_string(n) + " samples, max rel err " + selftest::fmt(worst) + " < 1e-10"};
  });

  report(2, "Asymptotic law at z = 1000", 1.0, [] {
    double worst = 0.0;
    for (double a : {0.5, 0.8}) {
      const double z = 1e3;
      worst = std::max(worst, std::abs(-mittag_leffler(a, a, -z) * z * z * subjtime::gamma(-a) - 1.0));
    }
    return Result{worst < 0.05, "|E z^2 Gamma(-a) (-1) - 1| = " + selftest::fmt(worst) + " < 0.05"};
  });

  report(3, "Left inverse D^a I^a f = f", 60.0, [] { return below(selftest::left_inverse()); });
  report(4, "Marchaud and Riemann-Liouville forms agree", 60.0, [] { return below(selftest::marchaud_vs_rl()); });
  report(5, "Eigen-identity for lambda = 1 and 0.5 + 2i", 0.0,
         [] { return below(selftest::eigen_identity({1.0, cplx(0.5, 2.0)})); });
  report(6, "Plancherel on 20 pairs per profile", 0.0, [] { return below(selftest::plancherel(20)); });
  report(7, "Spectral multiplier reproduces the Marchaud derivative", 0.0,
         [] { return below(selftest::multiplier_vs_marchaud()); });
  report(8, "Convolution theorem with sqrt(2 pi)", 0.0, [] { return below(selftest::convolution_theorem()); });

  report(9, "Kelvin-Voigt cross-validation and residuals", 0.0, [] {
    const auto cross = selftest::kv_cross_validation();
    const auto resid = selftest::kv_residual_final();
    const auto manu = selftest::kv_manufactured();
    // residual of the exact manufactured solution evaluated through the solver
    double manu_res = 0.0;
    for (const Profile& p : selftest::full_line_profiles()) {
      const KVModel m{0.8, 1.0, p};
      const Signal sigma = eigenfunction(p, 1.0);
      const Signal f = combine(m.lambda + 1.0, sigma, 0.0, sigma);
      manu_res = std::max(manu_res, kv_residual(solution_signal(m, f), f, m, {-0.5, 0.5}));
    }
    const bool ok = cross.passed() && resid.passed() && manu.passed() && manu_res < 1e-4;
    return Result{ok, "time vs spectral " + selftest::fmt(cross.value) + " < 1e-3, kv_residual " +
                          selftest::fmt(resid.value) + " < 1e-3, manufactured " +
                          selftest::fmt(std::max(manu.value, manu_res)) + " < 1e-4"};
  });

  report(10, "Amnesia Case I log-log slope over [50, 500]", 5.0, [] {
    const DecayFit f = amnesia_fit({0.8, 1.0, standard_profile()}, log_samples(50.0, 500.0, 40), FitMode::LogLog);
    return Result{std::abs(f.slope_or_rate + 1.8) <= 0.05, "slope " + selftest::fmt(f.slope_or_rate) + " in -1.8 +- 0.05"};
  });

  report(11, "Amnesia Case II semilog rate over [5, 12]", 5.0, [] {
    const KVModel m{0.8, 1.0, {ScaleFunction::exponential(0.8), WeightFunction::constant(1.0), "rapid_aging"}};
    const DecayFit f = amnesia_fit(m, linspace(5.0, 12.0, 30), FitMode::SemiLog);
    return Result{std::abs(f.slope_or_rate + 1.44) <= 0.05, "rate " + selftest::fmt(f.slope_or_rate) + " in -1.44 +- 0.05"};
  });

  report(12, "figure1 end to end, deterministic", 0.0, [&] {
    if (cli.empty()) return Result{false, "no CLI path given"};
    const fs::path root = fs::temp_directory_path() / ("subjtime_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const fs::path a = root / "a", b = root / "b";
    for (const auto& d : {a, b}) {
      const std::string cmd = "\"" + cli + "\" figure1 --out-dir \"" + d.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return Result{false, "figure1 exited nonzero"};
    }
    const char* files[] = {"figure1_standard.csv", "figure1_rapid_aging.csv", "figure1_weighted_damping.csv",
                           "figure1_fits.csv"};
    for (const char* f : files) {
      const std::string x = slurp(a / f);
      if (x.empty()) return Result{false, std::string(f) + " missing"};
      if (x != slurp(b / f)) return Result{false, std::string(f) + " differs between runs"};
      const std::string head = x.substr(0, x.find('\n'));
      if (head != (std::string(f) == "figure1_fits.csv" ? csv::kFitHeader : csv::kCurveHeader))
        return Result{false, std::string(f) + " has header " + head};
    }
    std::map<std::string, double> fit;
    std::istringstream rows(slurp(a / "figure1_fits.csv"));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() == 6) fit[cells[0]] = std::stod(cells[2]);
    }
    fs::remove_all(root);
    if (fit.size() != 3) return Result{false, "fit report does not list three scenarios"};
    const double s = fit["standard"], r = fit["rapid_aging"], w = fit["weighted_damping"];
    const bool ok = std::abs(s + 1.8) <= 0.05 && std::abs(r + 1.44) <= 0.05 && std::abs(w - s) < 1e-6;
    return Result{ok, "byte-identical reruns; standard " + selftest::fmt(s) + ", rapid_aging " + selftest::fmt(r) +
                          ", weighted_damping " + selftest::fmt(w)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
