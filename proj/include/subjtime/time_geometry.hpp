#pragma once

// Subjective-time geometry: scale functions psi, weights omega, profiles,
// grid functions and the conjugation map
//   (T u)(s) = omega(psi^{-1}(s)) u(psi^{-1}(s)),   (T^{-1} v)(t) = v(psi(t)) / omega(t).

#include <subjtime/errors.hpp>
#include <subjtime/interp.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace subjtime {

using cplx = std::complex<double>;

/// Strictly increasing time change psi with derivative and inverse.
class ScaleFunction {
 public:
  enum class Kind { Linear, Exponential, Power, Tabulated };

  /// psi(t) = a t + b, a > 0.
  static ScaleFunction linear(double a = 1.0, double b = 0.0) {
    if (!(a > 0.0) || !std::isfinite(b)) throw DomainError("linear scale: slope must be positive");
    ScaleFunction s(Kind::Linear);
    s.p1_ = a;
    s.p2_ = b;
    return s;
  }

  /// psi(t) = exp(gamma t), gamma > 0. The range is (0, inf).
  static ScaleFunction exponential(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("exponential scale: gamma must be positive");
    ScaleFunction s(Kind::Exponential);
    s.p1_ = gamma;
    return s;
  }

  /// psi(t) = t^p + c t for odd p >= 1, c >= 0 (c = 0 is allowed so that
  /// validation can flag the vanishing derivative of t^3 at the origin).
  static ScaleFunction power(int p, double c = 1.0) {
    if (p < 1 || p % 2 == 0) throw DomainError("power scale: exponent must be an odd positive integer");
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("power scale: linear coefficient must be >= 0");
    ScaleFunction s(Kind::Power);
    s.pi_ = p;
    s.p1_ = c;
    return s;
  }

  /// Monotone-interpolated table (t_i, psi_i), both strictly increasing,
  /// at least 8 samples. Defined on the table span only.
  static ScaleFunction tabulated(std::vector<double> t, std::vector<double> psi) {
    if (t.size() < 8 || psi.size() != t.size())
      throw DomainError("tabulated scale: need at least 8 samples of equal length");
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      if (!(t[i + 1] > t[i])) throw DomainError("tabulated scale: t samples must be strictly increasing");
      if (!(psi[i + 1] > psi[i]))
        throw DomainError("tabulated scale: monotonicity violation at sample " + std::to_string(i + 1));
    }
    ScaleFunction s(Kind::Tabulated);
    s.table_ = std::make_shared<const MonotoneCubic>(std::move(t), std::move(psi));
    return s;
  }

  /// Reads a two-column CSV with header `t,psi`.
  static ScaleFunction from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("tabulated scale: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DomainError("tabulated scale: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,psi") throw DomainError("tabulated scale: expected header `t,psi` in " + path);
    std::vector<double> t, psi;
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string a, b;
      if (!std::getline(ls, a, ',') || !std::getline(ls, b))
        throw DomainError(path + ":" + std::to_string(lineno) + ": expected two columns");
      try {
        std::size_t pa = 0, pb = 0;
        const double ta = std::stod(a, &pa), tb = std::stod(b, &pb);
        t.push_back(ta);
        psi.push_back(tb);
      } catch (const std::exception&) {
        throw DomainError(path + ":" + std::to_string(lineno) + ": unparsable number");
      }
    }
    return tabulated(std::move(t), std::move(psi));
  }

  Kind kind() const { return kind_; }

  double operator()(double t) const { return eval(t); }

  double eval(double t) const {
    switch (kind_) {
      case Kind::Linear: return p1_ * t + p2_;
      case Kind::Exponential: return std::exp(p1_ * t);
      case Kind::Power: return ipow(t, pi_) + p1_ * t;
      case Kind::Tabulated: check_table(t); return (*table_)(t);
    }
    return 0.0;
  }

  double deriv(double t) const {
    switch (kind_) {
      case Kind::Linear: return p1_;
      case Kind::Exponential: return p1_ * std::exp(p1_ * t);
      case Kind::Power: return pi_ * ipow(t, pi_ - 1) + p1_;
      case Kind::Tabulated: check_table(t); return table_->derivative(t);
    }
    return 0.0;
  }

  double inverse(double s) const {
    switch (kind_) {
      case Kind::Linear: return (s - p2_) / p1_;
      case Kind::Exponential:
        if (!(s > 0.0)) throw DomainError("exponential scale: inverse needs s > 0");
        return std::log(s) / p1_;
      case Kind::Power: return power_inverse(s);
      case Kind::Tabulated: return table_inverse(s);
    }
    return 0.0;
  }

  /// lim_{t -> -inf} psi(t) (or the first sample for tables).
  double range_inf() const {
    switch (kind_) {
      case Kind::Exponential: return 0.0;
      case Kind::Tabulated: return table_->values().front();
      default: return -std::numeric_limits<double>::infinity();
    }
  }
  double range_sup() const {
    return kind_ == Kind::Tabulated ? table_->values().back() : std::numeric_limits<double>::infinity();
  }
  /// Laboratory-time domain, the full line except for tables.
  double domain_min() const {
    return kind_ == Kind::Tabulated ? table_->front() : -std::numeric_limits<double>::infinity();
  }
  double domain_max() const {
    return kind_ == Kind::Tabulated ? table_->back() : std::numeric_limits<double>::infinity();
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    switch (kind_) {
      case Kind::Linear: os << "linear:" << p1_ << "," << p2_; break;
      case Kind::Exponential: os << "exp:" << p1_; break;
      case Kind::Power: os << "power:" << pi_ << "," << p1_; break;
      case Kind::Tabulated: os << "tabulated:" << table_->size(); break;
    }
    return os.str();
  }

 private:
  explicit ScaleFunction(Kind k) : kind_(k) {}

  static double ipow(double t, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= t;
    return r;
  }

  void check_table(double t) const {
    if (!table_->contains(t, 1e-12 * (1.0 + std::abs(t))))
      throw DomainError("tabulated scale: t outside the table span");
  }

  double power_inverse(double s) const {
    if (pi_ == 1) return s / (1.0 + p1_);
    // bracket, then safeguarded Newton
    double lo = -1.0, hi = 1.0;
    while (eval(lo) > s) lo *= 2.0;
    while (eval(hi) < s) hi *= 2.0;
    double t = std::cbrt(s);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = eval(t) - s;
      if (f == 0.0) return t;
      if (f > 0.0) hi = t; else lo = t;
      const double d = deriv(t);
      double next = d > 0.0 ? t - f / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-16 * (1.0 + std::abs(t))) return next;
      t = next;
    }
    return t;
  }

  double table_inverse(double s) const {
    const auto& ps = table_->values();
    if (!(s >= ps.front() - 1e-12 * (1.0 + std::abs(ps.front())) &&
          s <= ps.back() + 1e-12 * (1.0 + std::abs(ps.back()))))
      throw DomainError("tabulated scale: s outside the table range");
    auto it = std::upper_bound(ps.begin(), ps.end(), s);
    std::size_t i = it == ps.begin() ? 0 : static_cast<std::size_t>(it - ps.begin()) - 1;
    i = std::min(i, ps.size() - 2);
    double lo = table_->nodes()[i], hi = table_->nodes()[i + 1];
    // bisection on the (monotone) interpolant
    while (hi - lo > 1e-13 * (1.0 + std::abs(lo))) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if ((*table_)(mid) < s) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  Kind kind_;
  double p1_ = 0.0, p2_ = 0.0;
  int pi_ = 1;
  std::shared_ptr<const MonotoneCubic> table_;
};

/// Positive memory density omega.
class WeightFunction {
 public:
  enum class Kind { Constant, Exponential, PowerPositive };

  static WeightFunction constant(double c = 1.0) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("constant weight: value must be positive");
    return WeightFunction(Kind::Constant, c);
  }
  /// omega(t) = exp(rho t).
  static WeightFunction exponential(double rho) {
    if (!std::isfinite(rho)) throw DomainError("exponential weight: rate must be finite");
    return WeightFunction(Kind::Exponential, rho);
  }
  /// omega(t) = (1 + t^2)^q.
  static WeightFunction power_positive(double q) {
    if (!std::isfinite(q)) throw DomainError("power weight: exponent must be finite");
    return WeightFunction(Kind::PowerPositive, q);
  }

  Kind kind() const { return kind_; }
  double param() const { return p_; }
  double operator()(double t) const { return eval(t); }

  double eval(double t) const {
    switch (kind_) {
      case Kind::Constant: return p_;
      case Kind::Exponential: return std::exp(p_ * t);
      case Kind::PowerPositive: return std::pow(1.0 + t * t, p_);
    }
    return 1.0;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    switch (kind_) {
      case Kind::Constant: os << "const:" << p_; break;
      case Kind::Exponential: os << "exp:" << p_; break;
      case Kind::PowerPositive: os << "power:" << p_; break;
    }
    return os.str();
  }

 private:
  WeightFunction(Kind k, double p) : kind_(k), p_(p) {}
  Kind kind_;
  double p_;
};

struct Profile {
  ScaleFunction scale;
  WeightFunction weight;
  std::string label;

  /// Conjugated value omega(psi^{-1}(s)) f(psi^{-1}(s)) of a lab-time callable.
  template <class F>
  cplx conjugated(F&& f, double s) const {
    const double t = scale.inverse(s);
    return weight(t) * f(t);
  }
};

inline Profile standard_profile() {
  return {ScaleFunction::linear(1.0, 0.0), WeightFunction::constant(1.0), "standard"};
}

/// Complex samples on a strictly increasing grid.
struct GridFunction {
  std::vector<double> grid;
  std::vector<cplx> values;

  GridFunction() = default;
  GridFunction(std::vector<double> g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
    validate();
  }

  std::size_t size() const { return grid.size(); }

  void validate() const {
    if (grid.size() != values.size()) throw DomainError("GridFunction: grid and values differ in length");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
      if (!(grid[i + 1] > grid[i])) throw DomainError("GridFunction: grid must be strictly increasing");
    for (const auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw DomainError("GridFunction: non-finite value");
  }

  template <class F>
  static GridFunction sample(const std::vector<double>& g, F&& f) {
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g[i]);
    return GridFunction(g, std::move(v));
  }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw DomainError("linspace: need at least 2 points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = b;
  return g;
}

/// v(s) = omega(psi^{-1}(s)) u(psi^{-1}(s)), u interpolated monotonically.
inline GridFunction conjugate(const GridFunction& u, const Profile& p, const std::vector<double>& subjective_grid) {
  u.validate();
  if (u.size() < 2) throw DomainError("conjugate: need at least 2 samples");
  const ComplexCubic ui(u.grid, u.values);
  const double s_lo = p.scale(u.grid.front()), s_hi = p.scale(u.grid.back());
  std::vector<cplx> out(subjective_grid.size());
  for (std::size_t i = 0; i < subjective_grid.size(); ++i) {
    const double s = subjective_grid[i];
    const double slack = 1e-12 * (1.0 + std::abs(s));
    if (!(s >= s_lo - slack && s <= s_hi + slack)) {
      std::ostringstream os;
      os << "conjugate: s = " << s << " outside [" << s_lo << ", " << s_hi << "]";
      throw DomainError(os.str());
    }
    const double t = std::clamp(p.scale.inverse(s), u.grid.front(), u.grid.back());
    out[i] = p.weight(t) * ui(t);
  }
  return GridFunction(subjective_grid, std::move(out));
}

/// u(t) = v(psi(t)) / omega(t).
inline GridFunction conjugate_inverse(const GridFunction& v, const Profile& p, const std::vector<double>& lab_grid) {
  v.validate();
  if (v.size() < 2) throw DomainError("conjugate_inverse: need at least 2 samples");
  const ComplexCubic vi(v.grid, v.values);
  std::vector<cplx> out(lab_grid.size());
  for (std::size_t i = 0; i < lab_grid.size(); ++i) {
    const double s = p.scale(lab_grid[i]);
    const double slack = 1e-12 * (1.0 + std::abs(s));
    if (!vi.contains(s, slack)) {
      std::ostringstream os;
      os << "conjugate_inverse: psi(t) = " << s << " outside [" << v.grid.front() << ", " << v.grid.back() << "]";
      throw DomainError(os.str());
    }
    out[i] = vi(std::clamp(s, v.grid.front(), v.grid.back())) / p.weight(lab_grid[i]);
  }
  return GridFunction(lab_grid, std::move(out));
}

/// Trapezoid approximation of int |u| omega psi' dt over the grid span.
inline double weighted_norm_l1(const GridFunction& u, const Profile& p) {
  u.validate();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double a = std::abs(u.values[i]) * p.weight(u.grid[i]) * p.scale.deriv(u.grid[i]);
    const double b = std::abs(u.values[i + 1]) * p.weight(u.grid[i + 1]) * p.scale.deriv(u.grid[i + 1]);
    acc += 0.5 * (u.grid[i + 1] - u.grid[i]) * (a + b);
  }
  return acc;
}

/// Trapezoid int |v| ds (classical L1 norm of a subjective-time function).
inline double l1_norm(const GridFunction& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    acc += 0.5 * (v.grid[i + 1] - v.grid[i]) * (std::abs(v.values[i]) + std::abs(v.values[i + 1]));
  return acc;
}

struct ProfileReport {
  double min_dpsi = std::numeric_limits<double>::infinity();
  double min_omega = std::numeric_limits<double>::infinity();
  double max_inv_omega = 0.0;
  bool monotone = true;
  double inverse_max_error = 0.0;
  bool finite_range_inf = false;  ///< flagged, not rejected

  bool derivative_positive() const { return min_dpsi > 0.0; }
  bool weight_positive() const { return min_omega > 0.0 && std::isfinite(max_inv_omega); }
  bool inverse_consistent() const { return inverse_max_error < 1e-10; }
  bool passed() const { return monotone && derivative_positive() && weight_positive() && inverse_consistent(); }
};

inline ProfileReport validate_profile(const Profile& p, const std::vector<double>& probe_grid) {
  if (probe_grid.empty()) throw DomainError("validate_profile: empty probe grid");
  ProfileReport r;
  double prev_t = 0.0, prev_psi = 0.0;
  for (std::size_t i = 0; i < probe_grid.size(); ++i) {
    const double t = probe_grid[i];
    const double psi = p.scale(t);
    r.min_dpsi = std::min(r.min_dpsi, p.scale.deriv(t));
    const double w = p.weight(t);
    r.min_omega = std::min(r.min_omega, w);
    r.max_inv_omega = std::max(r.max_inv_omega, 1.0 / w);
    if (i > 0 && t > prev_t && !(psi > prev_psi)) r.monotone = false;
    r.inverse_max_error = std::max(r.inverse_max_error, std::abs(p.scale.inverse(psi) - t));
    prev_t = t;
    prev_psi = psi;
  }
  r.finite_range_inf = std::isfinite(p.scale.range_inf());
  return r;
}

}  // namespace subjtime
