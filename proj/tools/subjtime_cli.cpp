// subjtime_cli: command-line front end. Exit status 2 for argument and
// domain errors, 3 for numerical convergence failures.

#include <subjtime/csv.hpp>
#include <subjtime/operators.hpp>
#include <subjtime/scenario.hpp>
#include <subjtime/selftest.hpp>
#include <subjtime/special_fn.hpp>
#include <subjtime/spectral.hpp>
#include <subjtime/viscoelastic.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace subjtime;

namespace {

constexpr int kArgError = 2;
constexpr int kConvergenceError = 3;

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(cell, &pos));
      if (pos != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw DomainError("unparsable number '" + cell + "'");
    }
  }
  return out;
}

/// Output sink: a file, or stdout for "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DomainError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  bool is_stdout() const { return !file_; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

Profile make_profile(const std::string& scale, const std::string& weight) {
  return {parse_scale(scale), parse_weight(weight), "cli"};
}

/// `gauss[:c[,w[,nu]]]` (subjective centre, width, frequency) or `exp:mu`.
Signal make_signal(const Profile& p, const std::string& spec) {
  const auto c = spec.find(':');
  const std::string kind = spec.substr(0, c);
  const auto args = c == std::string::npos ? std::vector<double>{} : parse_reals(spec.substr(c + 1));
  if (kind == "gauss") {
    const double L = p.scale.range_inf();
    const double centre = args.size() > 0 ? args[0] : (std::isfinite(L) ? L + 4.0 : 0.0);
    const double width = args.size() > 1 ? args[1] : 0.5;
    const double nu = args.size() > 2 ? args[2] : 0.0;
    if (args.size() > 3) throw DomainError("gauss signal takes c[,w[,nu]]");
    return subjective_gaussian(p, centre, width, nu);
  }
  if (kind == "exp") {
    if (args.size() != 1) throw DomainError("exp signal takes one rate");
    return eigenfunction(p, args[0]);
  }
  throw DomainError("unknown signal '" + spec + "' (gauss[:c[,w[,nu]]] or exp:mu)");
}

// Up to n probes for the residual: half across the pulse, half across the output grid.
std::vector<double> residual_probes(const ScenarioConfig& c, std::size_t n) {
  const Profile& p = c.profile;
  std::vector<double> at;
  const double L = p.scale.range_inf();
  const double s_lo = std::max(c.forcing.center - 3.0 * c.forcing.width, std::isfinite(L) ? L + 1e-3 : -1e300);
  const double t_lo = std::max(c.t_min, p.scale.inverse(s_lo));
  const double t_hi = std::min(c.t_max, p.scale.inverse(c.forcing.center + 3.0 * c.forcing.width));
  if (t_hi > t_lo)
    for (double t : linspace(t_lo, t_hi, n / 2)) at.push_back(t);
  const auto g = c.grid();
  const std::size_t stride = std::max<std::size_t>(1, g.size() / (n - n / 2));
  for (std::size_t i = stride / 2; i < g.size(); i += stride) at.push_back(g[i]);
  std::sort(at.begin(), at.end());
  at.erase(std::unique(at.begin(), at.end()), at.end());
  return at;
}

// Frequency grid for the spectral solver: the step keeps the periodic images
// of the algebraic tail near 1e-3 relative over the output window.
std::vector<double> solver_frequencies(const ScenarioConfig& c, double s_lo) {
  const double span = c.profile.scale(c.t_max) - s_lo;
  const double period = 50.0 * span + 50.0;
  const double h = 2.0 * std::numbers::pi / period;
  const double xi_max = 9.0 / c.forcing.width;
  if (xi_max / h > 1e5)
    throw DomainError("solve: subjective window " + std::to_string(span) +
                      " is too long for the spectral method; use --method time");
  return frequency_grid(xi_max, h);
}

int cmd_ml(double alpha, double beta, const std::string& z) {
  const auto v = parse_reals(z);
  if (v.empty() || v.size() > 2) throw DomainError("--z expects RE or RE,IM");
  if (v.size() == 1) {
    std::cout << csv::num(mittag_leffler(alpha, beta, v[0])) << '\n';
    return 0;
  }
  const cplx e = mittag_leffler(alpha, beta, cplx(v[0], v[1]));
  std::cout << csv::num(e.real()) << ',' << csv::num(e.imag()) << '\n';
  return 0;
}

int cmd_operator(bool derivative, double alpha, const std::string& scale, const std::string& weight,
                 const std::vector<double>& at, const std::string& signal, const std::string& input,
                 const std::string& form) {
  const Profile p = make_profile(scale, weight);
  const Signal f = input.empty() ? make_signal(p, signal) : Signal::from_grid(p, csv::read_grid_function(input));
  if (at.empty()) throw DomainError("--at needs at least one time");
  if (derivative && form != "marchaud" && form != "rl") throw DomainError("--form must be marchaud or rl");
  const GridFunction g = evaluate_on_grid(at, [&](double t) {
    if (!derivative) return weyl_integral(alpha, f, t);
    return form == "rl" ? weyl_derivative_rl(alpha, f, t) : weyl_derivative_marchaud(alpha, f, t);
  });
  std::cout << "t,re,im\n";
  for (std::size_t i = 0; i < g.size(); ++i)
    std::cout << csv::num(g.grid[i]) << ',' << csv::num(g.values[i].real()) << ',' << csv::num(g.values[i].imag())
              << '\n';
  return 0;
}

int cmd_transform(const std::string& input, const std::string& scale, const std::string& weight, double xi_max,
                  double xi_step, const std::string& output) {
  const Profile p = make_profile(scale, weight);
  const GridFunction f = csv::read_grid_function(input);
  const SpectralGrid F = forward_transform(f, p, frequency_grid(xi_max, xi_step));
  Sink out(output);
  csv::write_spectrum(out.os(), F);
  return 0;
}

int cmd_solve(const std::string& config, const std::string& method, const std::string& output) {
  const ScenarioConfig c = parse_scenario_file(config);
  const KVModel m = c.model();
  const Signal f = pulse_forcing(c.profile, c.forcing);
  const auto grid = c.grid();
  const auto probes = residual_probes(c, 16);
  GridFunction sigma;
  double residual = 0.0;
  if (method == "time") {
    sigma = solve_kv_timedomain(m, f, grid, c.quad);
    residual = kv_residual(solution_signal(m, f, c.quad), f, m, probes, c.quad);
  } else if (method == "spectral") {
    const double L = c.profile.scale.range_inf();
    const double s_lo = std::max(c.forcing.center - 12.0 * c.forcing.width, std::isfinite(L) ? L : -1e300);
    const double s_hi = c.forcing.center + 12.0 * c.forcing.width;
    const SpectralGrid F = forward_transform(f, s_lo, s_hi, 801, solver_frequencies(c, s_lo));
    const Symbol sym = kv_resolvent_symbol(m.alpha, m.lambda);
    sigma = inverse_transform(F, sym, c.profile, grid);
    // residual of the cubic interpolant through a fine subjective-uniform resampling
    const double S_hi = c.profile.scale(c.t_max);
    const auto n_fine = static_cast<std::size_t>(std::clamp((S_hi - s_lo) / 0.005, 64.0, 20000.0)) + 1;
    std::vector<double> fine;
    for (double s : linspace(s_lo, S_hi, n_fine)) fine.push_back(c.profile.scale.inverse(s));
    const GridFunction sf = inverse_transform(F, sym, c.profile, fine);
    QuadratureSpec q = c.quad;
    q.rel_tol = std::max(q.rel_tol, 1e-7);
    std::vector<double> inside;
    for (double t : probes)
      if (t > fine.front()) inside.push_back(t);
    residual = kv_residual(Signal::from_grid(c.profile, sf), f, m, inside, q);
  } else {
    throw DomainError("--method must be time or spectral");
  }
  Sink out(output);
  csv::write_curves(out.os(), {{c.label, m, sigma}});
  (out.is_stdout() ? std::cerr : std::cout) << "residual," << csv::num(residual) << '\n';
  return 0;
}

int cmd_amnesia(const std::string& config, const std::string& mode_s, double t_min, double t_max, int samples,
                const std::string& output) {
  const ScenarioConfig c = parse_scenario_file(config);
  const FitMode mode = parse_fit_mode(mode_s);
  if (t_min <= 0.0) t_min = mode == FitMode::LogLog ? 50.0 : 5.0;
  if (t_max <= 0.0) t_max = mode == FitMode::LogLog ? 500.0 : 12.0;
  if (!(t_max > t_min)) throw DomainError("--t-max must exceed --t-min");
  if (samples < 10) throw DomainError("--samples must be at least 10");
  std::vector<double> t;
  for (int i = 0; i < samples; ++i) {
    const double x = static_cast<double>(i) / (samples - 1);
    t.push_back(mode == FitMode::LogLog ? t_min * std::pow(t_max / t_min, x) : t_min + (t_max - t_min) * x);
  }
  t.back() = t_max;
  const DecayFit fit = amnesia_fit(c.model(), t, mode);
  Sink out(output);
  csv::write_fit_report(out.os(), {{c.label, fit}});
  return 0;
}

/// Lab grid shared by the three curves: dense over the pulse, log-spaced tail to 500.
std::vector<double> figure1_grid() {
  std::vector<double> g = linspace(0.0, 12.0, 241);
  for (int i = 1; i <= 80; ++i) g.push_back(12.0 * std::pow(500.0 / 12.0, i / 80.0));
  g.back() = 500.0;
  return g;
}

int cmd_figure1(const std::string& out_dir, double alpha, double lambda) {
  const ForcingSpec forcing;
  const auto curves = relaxation_experiment(figure1_scenarios(alpha, lambda), forcing, figure1_grid());
  std::filesystem::create_directories(out_dir);
  for (const auto& c : curves) {
    const auto path = std::filesystem::path(out_dir) / ("figure1_" + c.label + ".csv");
    Sink s(path.string());
    csv::write_curves(s.os(), {c});
    std::cout << path.string() << '\n';
  }
  std::vector<csv::FitRow> rows;
  rows.push_back({curves[0].label, curve_tail_fit(curves[0], forcing, FitMode::LogLog, 50.0, 500.0)});
  rows.push_back({curves[1].label, curve_tail_fit(curves[1], forcing, FitMode::SemiLog, 5.0, 12.0)});
  rows.push_back({curves[2].label, curve_tail_fit(curves[2], forcing, FitMode::LogLog, 50.0, 500.0)});
  const auto path = std::filesystem::path(out_dir) / "figure1_fits.csv";
  Sink s(path.string());
  csv::write_fit_report(s.os(), rows);
  std::cout << path.string() << '\n';
  for (const auto& r : rows)
    std::cout << r.scenario << ' ' << to_string(r.fit.mode) << ' ' << csv::num(r.fit.slope_or_rate) << '\n';
  return 0;
}

int cmd_selftest(const std::string& only) {
  int failed = 0, ran = 0;
  for (const auto& inv : selftest::invariants()) {
    if (!only.empty() && inv.module != only) continue;
    const auto o = selftest::run(inv);
    ++ran;
    char line[256];
    std::snprintf(line, sizeof line, "%s %s.%s %.3e < %.0e (%.2f s)", o.passed ? "PASS" : "FAIL", o.module.c_str(),
                  o.name.c_str(), o.m.value, o.m.threshold, o.seconds);
    std::cout << line;
    if (!o.error.empty()) std::cout << " error: " << o.error;
    std::cout << '\n' << std::flush;
    failed += !o.passed;
  }
  if (ran == 0) throw DomainError("selftest: no invariants in module '" + only + "'");
  std::cout << (ran - failed) << '/' << ran << " passed\n";
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subjective-time fractional calculus and viscoelastic relaxation"};
  app.require_subcommand(1);

  double alpha = 0.8, beta = 1.0, lambda = 1.0, xi_max = 16.0, xi_step = 0.05, t_min = 0.0, t_max = 0.0;
  int samples = 40;
  std::string z, scale = "linear", weight = "constant", signal = "gauss", input, form = "marchaud", output = "-",
                 config, method = "time", mode = "loglog", out_dir = ".", only;
  std::vector<double> at;

  auto* ml = app.add_subcommand("ml", "Mittag-Leffler function E_{a,b}(z)");
  ml->add_option("--alpha", alpha, "alpha > 0")->required();
  ml->add_option("--beta", beta, "beta")->required();
  ml->add_option("--z", z, "RE or RE,IM")->required();

  auto add_op = [&](const char* name, const char* help, bool deriv) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--alpha", alpha, "order")->required();
    s->add_option("--scale", scale, "linear[:a[,b]] | exp:g | power:p[,c] | table:file.csv")->capture_default_str();
    s->add_option("--weight", weight, "constant[:c] | exp:r | power:q")->capture_default_str();
    s->add_option("--at", at, "lab times (repeat or comma-separate)")->required()->delimiter(',');
    s->add_option("--signal", signal, "gauss[:c[,w[,nu]]] | exp:mu")->capture_default_str();
    s->add_option("--input", input, "lab-time samples CSV (t,re[,im]) instead of --signal");
    if (deriv) s->add_option("--form", form, "marchaud | rl")->capture_default_str();
    return s;
  };
  auto* fint = add_op("frac-int", "weighted Weyl fractional integral", false);
  auto* fder = add_op("frac-deriv", "weighted Weyl fractional derivative", true);

  auto* tr = app.add_subcommand("transform", "weighted Fourier transform of lab-time samples");
  tr->add_option("--input", input, "CSV t,re[,im]")->required();
  tr->add_option("--scale", scale)->capture_default_str();
  tr->add_option("--weight", weight)->capture_default_str();
  tr->add_option("--xi-max", xi_max)->capture_default_str();
  tr->add_option("--xi-step", xi_step)->capture_default_str();
  tr->add_option("--output,-o", output, "spectrum CSV (- for stdout)")->capture_default_str();

  auto* so = app.add_subcommand("solve", "Kelvin-Voigt response to the configured pulse");
  so->add_option("--config", config, "scenario file")->required();
  so->add_option("--method", method, "time | spectral")->capture_default_str();
  so->add_option("--output,-o", output, "curve CSV (- for stdout)")->capture_default_str();

  auto* am = app.add_subcommand("amnesia", "decay fit of the effective kernel K(t, 0)");
  am->add_option("--config", config, "scenario file")->required();
  am->add_option("--mode", mode, "loglog | semilog")->capture_default_str();
  am->add_option("--t-min", t_min, "fit window start (default 50 loglog, 5 semilog)");
  am->add_option("--t-max", t_max, "fit window end (default 500 loglog, 12 semilog)");
  am->add_option("--samples", samples)->capture_default_str();
  am->add_option("--output,-o", output, "fit report CSV (- for stdout)")->capture_default_str();

  auto* f1 = app.add_subcommand("figure1", "three relaxation scenarios plus tail fits");
  f1->add_option("--out-dir", out_dir)->capture_default_str();
  f1->add_option("--alpha", alpha)->capture_default_str();
  f1->add_option("--lambda", lambda)->capture_default_str();

  auto* st = app.add_subcommand("selftest", "run the invariant suite");
  st->add_option("--module", only, "restrict to one module");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kArgError;
  }

  try {
    if (ml->parsed()) return cmd_ml(alpha, beta, z);
    if (fint->parsed()) return cmd_operator(false, alpha, scale, weight, at, signal, input, form);
    if (fder->parsed()) return cmd_operator(true, alpha, scale, weight, at, signal, input, form);
    if (tr->parsed()) return cmd_transform(input, scale, weight, xi_max, xi_step, output);
    if (so->parsed()) return cmd_solve(config, method, output);
    if (am->parsed()) return cmd_amnesia(config, mode, t_min, t_max, samples, output);
    if (f1->parsed()) return cmd_figure1(out_dir, alpha, lambda);
    if (st->parsed()) return cmd_selftest(only);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConvergenceError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kArgError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kArgError;
  }
  return kArgError;
}
