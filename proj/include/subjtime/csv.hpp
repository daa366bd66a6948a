#pragma once
// CSV emission and ingestion. Every number is written as %.11e.

#include <subjtime/errors.hpp>
#include <subjtime/spectral.hpp>
#include <subjtime/time_geometry.hpp>
#include <subjtime/viscoelastic.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace subjtime::csv {

inline const char* kCurveHeader = "t,sigma_re,sigma_im,scenario";
inline const char* kFitHeader = "scenario,mode,slope_or_rate,rms_residual,t_min,t_max";
inline const char* kSpectrumHeader = "xi,re,im";
inline const char* kScaleHeader = "t,psi";

inline std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11e", x == 0.0 ? 0.0 : x);  // folds -0
  return buf;
}

inline void write_curves(std::ostream& os, const std::vector<ScenarioCurve>& curves) {
  os << kCurveHeader << '\n';
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.sigma.size(); ++i)
      os << num(c.sigma.grid[i]) << ',' << num(c.sigma.values[i].real()) << ',' << num(c.sigma.values[i].imag())
         << ',' << c.label << '\n';
}

struct FitRow {
  std::string scenario;
  DecayFit fit;
};

inline void write_fit_report(std::ostream& os, const std::vector<FitRow>& rows) {
  os << kFitHeader << '\n';
  for (const auto& r : rows)
    os << r.scenario << ',' << to_string(r.fit.mode) << ',' << num(r.fit.slope_or_rate) << ','
       << num(r.fit.rms_residual) << ',' << num(r.fit.t_min) << ',' << num(r.fit.t_max) << '\n';
}

inline void write_spectrum(std::ostream& os, const SpectralGrid& s) {
  os << kSpectrumHeader << '\n';
  for (std::size_t i = 0; i < s.xi.size(); ++i)
    os << num(s.xi[i]) << ',' << num(s.values[i].real()) << ',' << num(s.values[i].imag()) << '\n';
}

inline void write_scale(std::ostream& os, const ScaleFunction& psi, const std::vector<double>& t) {
  os << kScaleHeader << '\n';
  for (double x : t) os << num(x) << ',' << num(psi(x)) << '\n';
}

namespace detail {

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError(where + ": unparsable number '" + s + "'");
  }
}

}  // namespace detail

/// Lab-time samples from a CSV whose header is `t,re,im`, `t,re` or `t,value`.
inline GridFunction read_grid_function(std::istream& in, const std::string& name = "input") {
  std::string line;
  if (!std::getline(in, line)) throw DomainError(name + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = detail::split(line);
  const bool ok = head.size() >= 2 && head.size() <= 3 && head[0] == "t" &&
                  (head.size() == 3 ? head[1] == "re" && head[2] == "im" : head[1] == "re" || head[1] == "value");
  if (!ok) throw DomainError(name + ": expected header `t,re,im`, `t,re` or `t,value`, got `" + line + "`");
  GridFunction g;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    const auto cells = detail::split(line);
    if (cells.size() != head.size()) throw DomainError(where + ": expected " + std::to_string(head.size()) + " columns");
    g.grid.push_back(detail::to_double(cells[0], where));
    const double re = detail::to_double(cells[1], where);
    const double im = cells.size() == 3 ? detail::to_double(cells[2], where) : 0.0;
    g.values.emplace_back(re, im);
  }
  g.validate();
  return g;
}

inline GridFunction read_grid_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return read_grid_function(in, path);
}

}  // namespace subjtime::csv
