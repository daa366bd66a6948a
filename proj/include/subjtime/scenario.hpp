#pragma once
// Scenario files: `key = value` lines, `#` comments.
//
//   label = standard
//   alpha = 0.8                  # (0, 1]
//   lambda = 1.0
//   scale = linear               # linear[:a[,b]] | exp:gamma | power:p[,c] | table:path.csv
//   weight = constant            # constant[:c] | exp:rho | power:q
//   t_min = 0
//   t_max = 20
//   n_points = 201               # >= 16
//   forcing_center = 1           # subjective units
//   forcing_width = 0.1
//   forcing_amplitude = 1
//   rel_tol = 1e-10
//   abs_tol = 1e-14
//   tail_epsilon = 1e-12

#include <subjtime/errors.hpp>
#include <subjtime/quadrature.hpp>
#include <subjtime/time_geometry.hpp>
#include <subjtime/viscoelastic.hpp>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace subjtime {

struct ScenarioConfig {
  std::string label = "scenario";
  double alpha = 0.8;
  double lambda = 1.0;
  std::string scale_spec = "linear";
  std::string weight_spec = "constant";
  Profile profile = standard_profile();
  double t_min = 0.0;
  double t_max = 20.0;
  std::size_t n_points = 201;
  ForcingSpec forcing;
  QuadratureSpec quad;

  KVModel model() const { return {alpha, lambda, profile}; }
  std::vector<double> grid() const { return linspace(t_min, t_max, n_points); }
  Scenario scenario() const { return {label, model()}; }
};

namespace scenario_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double real(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw DomainError("unparsable number '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) throw DomainError("unparsable number '" + s + "'");
  return v;
}

inline std::vector<double> reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(real(trim(cell)));
  return out;
}

inline std::pair<std::string, std::string> kind_and_args(const std::string& spec) {
  const auto c = spec.find(':');
  if (c == std::string::npos) return {trim(spec), ""};
  return {trim(spec.substr(0, c)), trim(spec.substr(c + 1))};
}

}  // namespace scenario_detail

/// `linear[:a[,b]]`, `exp:gamma`, `power:p[,c]`, `table:path` (relative to base_dir).
inline ScaleFunction parse_scale(const std::string& spec, const std::filesystem::path& base_dir = {}) {
  using namespace scenario_detail;
  const auto [kind, args] = kind_and_args(spec);
  if (kind == "linear") {
    const auto v = args.empty() ? std::vector<double>{} : reals(args);
    if (v.size() > 2) throw DomainError("linear scale takes at most two parameters");
    return ScaleFunction::linear(v.size() > 0 ? v[0] : 1.0, v.size() > 1 ? v[1] : 0.0);
  }
  if (kind == "exp") {
    const auto v = reals(args);
    if (v.size() != 1) throw DomainError("exp scale takes one parameter (gamma)");
    return ScaleFunction::exponential(v[0]);
  }
  if (kind == "power") {
    const auto v = reals(args);
    if (v.empty() || v.size() > 2) throw DomainError("power scale takes p[,c]");
    if (v[0] != std::floor(v[0])) throw DomainError("power scale exponent must be an integer");
    return ScaleFunction::power(static_cast<int>(v[0]), v.size() > 1 ? v[1] : 1.0);
  }
  if (kind == "table") {
    if (args.empty()) throw DomainError("table scale needs a CSV path");
    std::filesystem::path p(args);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return ScaleFunction::from_csv(p.string());
  }
  throw DomainError("unknown scale kind '" + kind + "' (linear, exp, power, table)");
}

/// `constant[:c]`, `exp:rho`, `power:q`.
inline WeightFunction parse_weight(const std::string& spec) {
  using namespace scenario_detail;
  const auto [kind, args] = kind_and_args(spec);
  const auto v = args.empty() ? std::vector<double>{} : reals(args);
  if (kind == "constant") {
    if (v.size() > 1) throw DomainError("constant weight takes at most one parameter");
    return WeightFunction::constant(v.empty() ? 1.0 : v[0]);
  }
  if (v.size() != 1) throw DomainError(kind + " weight takes one parameter");
  if (kind == "exp") return WeightFunction::exponential(v[0]);
  if (kind == "power") return WeightFunction::power_positive(v[0]);
  throw DomainError("unknown weight kind '" + kind + "' (constant, exp, power)");
}

inline ScenarioConfig parse_scenario(std::istream& in, const std::string& name = "scenario",
                                     const std::filesystem::path& base_dir = {}) {
  using namespace scenario_detail;
  ScenarioConfig c;
  std::string line;
  int lineno = 0;
  int n_line = 0, alpha_line = 0, grid_line = 0;
  auto fail = [&](int ln, const std::string& msg) -> DomainError {
    return DomainError(name + ":" + std::to_string(ln) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail(lineno, "expected `key = value`");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (val.empty()) throw fail(lineno, "missing value for '" + key + "'");
    try {
      if (key == "label") {
        if (val.find_first_of(",\"") != std::string::npos) throw DomainError("label may not contain ',' or '\"'");
        c.label = val;
      } else if (key == "alpha") {
        c.alpha = real(val);
        alpha_line = lineno;
      } else if (key == "lambda") {
        c.lambda = real(val);
        if (!(c.lambda > 0.0)) throw DomainError("lambda must be positive");
      } else if (key == "scale") {
        c.profile.scale = parse_scale(val, base_dir);
        c.scale_spec = val;
      } else if (key == "weight") {
        c.profile.weight = parse_weight(val);
        c.weight_spec = val;
      } else if (key == "t_min") {
        c.t_min = real(val);
        grid_line = lineno;
      } else if (key == "t_max") {
        c.t_max = real(val);
        grid_line = lineno;
      } else if (key == "n_points") {
        const double n = real(val);
        if (n != std::floor(n) || n < 0) throw DomainError("n_points must be a non-negative integer");
        c.n_points = static_cast<std::size_t>(n);
        n_line = lineno;
      } else if (key == "forcing_center") {
        c.forcing.center = real(val);
      } else if (key == "forcing_width") {
        c.forcing.width = real(val);
        c.forcing.validate();
      } else if (key == "forcing_amplitude") {
        c.forcing.amplitude = real(val);
      } else if (key == "rel_tol") {
        c.quad.rel_tol = real(val);
        if (!(c.quad.rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
      } else if (key == "abs_tol") {
        c.quad.abs_tol = real(val);
        if (!(c.quad.abs_tol >= 0.0)) throw DomainError("abs_tol must be non-negative");
      } else if (key == "tail_epsilon") {
        c.quad.tail_epsilon = real(val);
        if (!(c.quad.tail_epsilon > 0.0 && c.quad.tail_epsilon < 1.0)) throw DomainError("tail_epsilon must lie in (0, 1)");
      } else {
        throw DomainError("unknown key '" + key + "'");
      }
    } catch (const DomainError& e) {
      throw fail(lineno, e.what());
    }
  }
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) {
    std::ostringstream os;
    os << "alpha = " << c.alpha << " outside (0, 1]";
    throw fail(alpha_line, os.str());
  }
  if (c.n_points < 16) throw fail(n_line, "n_points must be at least 16");
  if (!(c.t_max > c.t_min)) throw fail(grid_line, "t_max must exceed t_min");
  c.profile.label = c.label;
  return c;
}

inline ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open scenario file " + path);
  return parse_scenario(in, path, std::filesystem::path(path).parent_path());
}

}  // namespace subjtime
