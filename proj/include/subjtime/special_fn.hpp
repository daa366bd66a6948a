#pragma once

// Gamma-family helpers and the two-parameter Mittag-Leffler function
// E_{a,b}(z) = sum_k z^k / Gamma(b + a k).
//
// Evaluation regimes:
//   * double-precision Taylor series when the alternating sum is well
//     conditioned (small |z|);
//   * MPFR series with self-validated precision in the cancellation band;
//   * the algebraic asymptotic expansion on or near the negative real axis,
//     truncated at its smallest term.

#include <subjtime/detail/bigfloat.hpp>
#include <subjtime/errors.hpp>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

namespace subjtime {

using cplx = std::complex<double>;

namespace detail {

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

/// log|Gamma(x)| and its sign; x must not be a pole.
inline double log_abs_gamma(double x, int* sign) {
  return boost::math::lgamma(x, sign);
}

/// log|1/Gamma(x)| with sign; sign 0 at the poles of Gamma.
inline double log_abs_rgamma(double x, int* sign) {
  if (is_nonpositive_integer(x)) {
    *sign = 0;
    return -std::numeric_limits<double>::infinity();
  }
  if (x > 0.0) {
    int s = 1;
    const double lg = log_abs_gamma(x, &s);
    *sign = s;
    return -lg;
  }
  // Reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi, with 1-x > 1.
  const double sp = boost::math::sin_pi(x);
  int s = 1;
  const double lg = log_abs_gamma(1.0 - x, &s);
  *sign = sp > 0.0 ? 1 : -1;
  return lg + std::log(std::abs(sp)) - std::log(std::numbers::pi);
}

}  // namespace detail

/// Gamma(x). Throws PoleError at x in {0, -1, -2, ...}.
inline double gamma(double x) {
  if (std::isnan(x)) throw DomainError("gamma: NaN argument");
  if (detail::is_nonpositive_integer(x)) {
    std::ostringstream os;
    os << "gamma: pole at x = " << x << " (use reciprocal_gamma)";
    throw PoleError(os.str());
  }
  return std::tgamma(x);
}

/// 1/Gamma(x); exactly 0 at the poles of Gamma.
inline double reciprocal_gamma(double x) {
  if (std::isnan(x)) throw DomainError("reciprocal_gamma: NaN argument");
  if (detail::is_nonpositive_integer(x)) return 0.0;
  if (x > 0.0 && x < 170.0) return 1.0 / std::tgamma(x);
  if (x < 0.0 && x > -170.0) return 1.0 / std::tgamma(x);
  int sign = 0;
  const double l = detail::log_abs_rgamma(x, &sign);
  return sign * std::exp(l);
}

/// Regime thresholds and budgets for mittag_leffler.
struct MLRegimePolicy {
  double series_radius = 10.0;      ///< |z| at or below which the series is tried first
  double asymptotic_radius = 50.0;  ///< |z| at or above which the expansion is preferred
  int max_series_terms = 20000;
  int asymptotic_terms = 400;       ///< upper bound on expansion terms (optimal truncation)
  double tolerance = 1e-14;         ///< requested relative accuracy
  double max_extended_digits = 150; ///< cancellation budget for the MPFR series

  void validate() const {
    if (!(series_radius > 0.0) || !(series_radius <= asymptotic_radius))
      throw DomainError("MLRegimePolicy: need 0 < series_radius <= asymptotic_radius");
    if (max_series_terms < 1) throw DomainError("MLRegimePolicy: max_series_terms must be >= 1");
    if (asymptotic_terms < 2) throw DomainError("MLRegimePolicy: asymptotic_terms must be >= 2");
    if (!(tolerance > 0.0)) throw DomainError("MLRegimePolicy: tolerance must be positive");
  }
};

enum class MLRegime { Origin, DoubleSeries, ExtendedSeries, Asymptotic };

struct MLEvaluation {
  cplx value;
  MLRegime regime = MLRegime::Origin;
  double error_estimate = 0.0;  ///< absolute
  int terms = 0;
};

namespace detail {

// Location and size of the largest series term |z|^k / Gamma(b + a k), plus
// the number of terms needed before they fall `drop` nats below that peak.
struct SeriesProfile {
  double max_log = 0.0;
  int terms = 0;
};

inline double series_log_term(double a, double b, double log_r, int k) {
  int s = 1;
  return k * log_r - log_abs_gamma(b + a * k, &s);
}

inline SeriesProfile series_profile(double a, double b, double r, double drop, int max_terms) {
  SeriesProfile p;
  const double log_r = std::log(r);
  p.max_log = series_log_term(a, b, log_r, 0);
  // Terms increase until roughly k = r^(1/a) / a, then decay super-geometrically.
  const double k_peak = std::pow(r, 1.0 / a) / a;
  int k = 1;
  for (;; ++k) {
    if (k > max_terms) {
      p.terms = k;
      return p;
    }
    const double lt = series_log_term(a, b, log_r, k);
    p.max_log = std::max(p.max_log, lt);
    if (k > k_peak && lt < p.max_log - drop) break;
  }
  p.terms = k + 1;
  return p;
}

// Rough log of the largest series term, ~ |z|^(1/a).
inline double peak_log_estimate(double a, double r) { return std::pow(r, 1.0 / a); }

inline bool try_double_series(double a, double b, cplx z, const MLRegimePolicy& pol, MLEvaluation& out) {
  const double r = std::abs(z);
  // Alternating-type sums with a large peak term cannot meet the tolerance.
  if (z.real() < 0.0 && peak_log_estimate(a, r) > 2.0 * std::numbers::ln10) return false;
  const double k_peak = std::pow(r, 1.0 / a) / a;
  const double log_r = std::log(r), theta = std::arg(z);
  cplx sum = 0.0, comp = 0.0;
  double abs_sum = 0.0;
  int k = 0;
  for (; k < pol.max_series_terms; ++k) {
    // log domain: z^k alone overflows long before the terms do
    int sign = 0;
    const double lr = log_abs_rgamma(b + a * k, &sign);
    const cplx term = sign == 0 ? cplx(0.0) : static_cast<double>(sign) * std::polar(std::exp(k * log_r + lr), k * theta);
    if (!std::isfinite(term.real()) || !std::isfinite(term.imag())) return false;
    // Kahan-compensated accumulation
    const cplx y = term - comp;
    const cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    abs_sum += std::abs(term);
    if (k > k_peak + 2 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
    if (k > k_peak + 2 && std::abs(term) == 0.0) break;
  }
  if (k >= pol.max_series_terms) return false;
  const double err = 2.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  if (!(err <= pol.tolerance * std::abs(sum))) return false;
  out = {sum, MLRegime::DoubleSeries, err, k + 1};
  return true;
}

// Cached 1/Gamma(b + a k) coefficients at a given precision. Computing the
// MPFR gamma values dominates the extended-series cost, so they are shared
// across evaluations with the same (a, b).
struct CoefficientTable {
  mpfr_prec_t bits = 0;
  std::vector<BigFloat> rgamma;
};

class CoefficientCache {
 public:
  static CoefficientCache& instance() {
    static CoefficientCache cache;
    return cache;
  }

  std::shared_ptr<const CoefficientTable> get(double a, double b, mpfr_prec_t bits, int terms) {
    const auto key = std::make_pair(a, b);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = tables_.find(key);
      if (it != tables_.end() && it->second->bits >= bits &&
          static_cast<int>(it->second->rgamma.size()) >= terms)
        return it->second;
      if (it != tables_.end()) {
        bits = std::max(bits, it->second->bits);
        terms = std::max(terms, static_cast<int>(it->second->rgamma.size()));
      }
    }
    bits = ((bits + 127) / 128) * 128;
    terms = ((terms + 63) / 64) * 64;
    auto table = std::make_shared<CoefficientTable>();
    table->bits = bits;
    table->rgamma.reserve(terms);
    BigFloat arg(bits), tmp(bits);
    BigFloat abig(bits, a), bbig(bits, b);
    for (int k = 0; k < terms; ++k) {
      mpfr_mul_si(arg.get(), abig.get(), k, MPFR_RNDN);
      mpfr_add(arg.get(), arg.get(), bbig.get(), MPFR_RNDN);
      mpfr_gamma(tmp.get(), arg.get(), MPFR_RNDN);
      BigFloat c(bits);
      mpfr_ui_div(c.get(), 1, tmp.get(), MPFR_RNDN);
      table->rgamma.push_back(std::move(c));
    }
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = tables_[key];
    if (!slot || slot->bits < table->bits || slot->rgamma.size() < table->rgamma.size()) slot = table;
    return slot;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<double, double>, std::shared_ptr<const CoefficientTable>> tables_;
};

// Sum the series with `bits` of working precision. Returns the value and an
// absolute rounding-error bound.
inline std::pair<cplx, double> extended_series_sum(double a, double b, cplx z, mpfr_prec_t bits,
                                                   int terms) {
  auto table = CoefficientCache::instance().get(a, b, bits, terms);
  const mpfr_prec_t wbits = bits;
  BigFloat zr(wbits, z.real()), zi(wbits, z.imag());
  BigFloat pr(wbits, 1.0), pi(wbits, 0.0);
  BigFloat sr(wbits, 0.0), si(wbits, 0.0);
  BigFloat t1(wbits), t2(wbits), t3(wbits);
  const bool real_arg = z.imag() == 0.0;
  long max_exp = -(1L << 40);
  for (int k = 0; k < terms; ++k) {
    const BigFloat& c = table->rgamma[k];
    mpfr_mul(t1.get(), pr.get(), c.get(), MPFR_RNDN);
    max_exp = std::max(max_exp, t1.exponent2());
    mpfr_add(sr.get(), sr.get(), t1.get(), MPFR_RNDN);
    if (!real_arg) {
      mpfr_mul(t1.get(), pi.get(), c.get(), MPFR_RNDN);
      max_exp = std::max(max_exp, t1.exponent2());
      mpfr_add(si.get(), si.get(), t1.get(), MPFR_RNDN);
      // (pr + i pi) * (zr + i zi)
      mpfr_mul(t1.get(), pr.get(), zr.get(), MPFR_RNDN);
      mpfr_mul(t2.get(), pi.get(), zi.get(), MPFR_RNDN);
      mpfr_mul(t3.get(), pr.get(), zi.get(), MPFR_RNDN);
      mpfr_mul(pi.get(), pi.get(), zr.get(), MPFR_RNDN);
      mpfr_add(pi.get(), pi.get(), t3.get(), MPFR_RNDN);
      mpfr_sub(pr.get(), t1.get(), t2.get(), MPFR_RNDN);
    } else {
      mpfr_mul(pr.get(), pr.get(), zr.get(), MPFR_RNDN);
    }
  }
  // combine exponents before scaling: the peak term alone may overflow a double
  const long err_exp = std::clamp(max_exp - static_cast<long>(wbits), -2000L, 2000L);
  const double err = 4.0 * std::sqrt(static_cast<double>(terms)) * std::ldexp(1.0, static_cast<int>(err_exp));
  return {cplx(sr.to_double(), si.to_double()), err};
}

inline bool try_extended_series(double a, double b, cplx z, const MLRegimePolicy& pol,
                                MLEvaluation& out) {
  const double r = std::abs(z);
  const double tol_nats = -std::log(pol.tolerance) + 10.0;
  if (peak_log_estimate(a, r) > 1.5 * pol.max_extended_digits * std::numbers::ln10 + 50.0) return false;
  SeriesProfile prof = series_profile(a, b, r, 0.0, pol.max_series_terms);
  const double cancel_digits = std::max(0.0, prof.max_log) / std::numbers::ln10;
  if (cancel_digits > pol.max_extended_digits) return false;
  double digits = cancel_digits + tol_nats / std::numbers::ln10 + 10.0;
  for (int round = 0; round < 4; ++round) {
    if (digits > pol.max_extended_digits + 60.0) return false;
    const double drop = std::max(0.0, prof.max_log) + digits * std::numbers::ln10;
    const SeriesProfile p = series_profile(a, b, r, drop, pol.max_series_terms);
    if (p.terms > pol.max_series_terms) return false;
    const auto [value, err] = extended_series_sum(a, b, z, digits_to_bits(digits), p.terms);
    const double mag = std::abs(value);
    if (err <= pol.tolerance * mag || (mag == 0.0 && err == 0.0)) {
      out = {value, MLRegime::ExtendedSeries, err, p.terms};
      return true;
    }
    // The result is smaller than the guard assumed; add the missing digits.
    const double deficit = mag > 0.0 ? std::log10(err / (pol.tolerance * mag)) : 30.0;
    digits += std::max(deficit, 0.0) + 10.0;
  }
  return false;
}

inline bool near_negative_axis(double a, cplx z) {
  if (a >= 1.0) return false;
  const double arg = std::abs(std::arg(z));
  return std::numbers::pi - arg <= 0.5 * (1.0 - a) * std::numbers::pi;
}

// -sum_{k>=1} z^{-k} / Gamma(b - a k), truncated at the smallest term.
inline bool try_asymptotic(double a, double b, cplx z, const MLRegimePolicy& pol, MLEvaluation& out) {
  const double r = std::abs(z);
  const double log_r = std::log(r);
  const double theta = std::arg(z);
  cplx sum = 0.0;
  double prev_env = std::numeric_limits<double>::infinity();
  double err = std::numeric_limits<double>::infinity();
  int used = 0;
  for (int k = 1; k <= pol.asymptotic_terms; ++k) {
    const double y = b - a * k;
    // Envelope without the oscillating sin(pi y) factor; the two branches
    // meet at y = 1/2, so it stays monotone in k until the expansion diverges.
    int s = 1;
    const double env_log = -k * log_r + (y >= 0.5 ? -log_abs_gamma(y, &s)
                                                  : log_abs_gamma(1.0 - y, &s) - std::log(std::numbers::pi));
    const double env = std::exp(env_log);
    if (env > prev_env) {
      err = prev_env;
      break;
    }
    prev_env = env;
    int sign = 0;
    const double lr = detail::log_abs_rgamma(y, &sign);
    if (sign != 0) {
      const double mag = std::exp(-k * log_r + lr);
      sum -= static_cast<double>(sign) * std::polar(mag, -k * theta);
    }
    used = k;
    if (env <= 1e-3 * pol.tolerance * std::abs(sum)) {
      err = env;
      break;
    }
  }
  // Guard for the exponentially small terms the algebraic expansion omits,
  // ~ (2/a) r^((1-b)/a) exp(r^(1/a) cos(theta/a)); they only compete with the
  // truncation error as a -> 1, where the cosine is negative.
  const double c = std::cos(std::abs(theta) / a);
  if (c < 0.0) err += (2.0 / a) * std::exp((1.0 - b) / a * log_r + std::pow(r, 1.0 / a) * c);
  if (!(err <= pol.tolerance * std::abs(sum))) return false;
  out = {sum, MLRegime::Asymptotic, err, used};
  return true;
}

}  // namespace detail

/// E_{alpha,beta}(z) with the regime actually used and an error estimate.
inline MLEvaluation mittag_leffler_detailed(double alpha, double beta, cplx z,
                                            const MLRegimePolicy& policy = {}) {
  policy.validate();
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("mittag_leffler: alpha must lie in (0, 2]");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("mittag_leffler: beta must be > 0");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("mittag_leffler: z must be finite");

  const double r = std::abs(z);
  if (r == 0.0) return {cplx(reciprocal_gamma(beta), 0.0), MLRegime::Origin, 0.0, 1};

  MLEvaluation out;
  const bool asym_ok = detail::near_negative_axis(alpha, z);
  if (r <= policy.series_radius && detail::try_double_series(alpha, beta, z, policy, out)) return out;
  // Below asymptotic_radius the expansion is still taken when its certified
  // error meets the tolerance: it is far cheaper than a deep MPFR sum.
  if (asym_ok && detail::try_asymptotic(alpha, beta, z, policy, out)) return out;
  if (detail::try_extended_series(alpha, beta, z, policy, out)) return out;

  std::ostringstream os;
  os << "mittag_leffler: no regime reached tolerance " << policy.tolerance << " for alpha=" << alpha
     << ", beta=" << beta << ", z=" << z;
  throw ConvergenceError(os.str());
}

inline cplx mittag_leffler(double alpha, double beta, cplx z, const MLRegimePolicy& policy = {}) {
  return mittag_leffler_detailed(alpha, beta, z, policy).value;
}

/// Real-argument convenience overload; E is real on the real axis.
inline double mittag_leffler(double alpha, double beta, double z, const MLRegimePolicy& policy = {}) {
  return mittag_leffler_detailed(alpha, beta, cplx(z, 0.0), policy).value.real();
}

/// Series evaluated in MPFR regardless of |z| (cross-validation helper).
/// Throws ConvergenceError when the cancellation budget is exceeded.
inline cplx mittag_leffler_series(double alpha, double beta, cplx z, MLRegimePolicy policy = {}) {
  policy.validate();
  MLEvaluation out;
  if (std::abs(z) == 0.0) return reciprocal_gamma(beta);
  if (!detail::try_extended_series(alpha, beta, z, policy, out))
    throw ConvergenceError("mittag_leffler_series: cancellation budget exceeded");
  return out.value;
}

/// N-term asymptotic approximation of E_{alpha,beta}(-z_mod):
///   -sum_{k=1}^{N} (-z_mod)^{-k} / Gamma(beta - alpha k).
/// Terms at poles of Gamma vanish exactly (the k = 1 term when beta == alpha).
/// Throws ConvergenceError when the last retained term is not smaller than
/// the first non-vanishing one (the truncation is already diverging).
inline double ml_asymptotic_negative(double alpha, double beta, double z_mod, int n_terms) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ml_asymptotic_negative: alpha must lie in (0, 1)");
  if (!(z_mod > 0.0)) throw DomainError("ml_asymptotic_negative: z_mod must be positive");
  if (n_terms < 1) throw DomainError("ml_asymptotic_negative: n_terms must be >= 1");
  double sum = 0.0;
  double first = 0.0, last = 0.0;
  const double log_z = std::log(z_mod);
  for (int k = 1; k <= n_terms; ++k) {
    int sign = 0;
    const double lr = detail::log_abs_rgamma(beta - alpha * k, &sign);
    if (sign == 0) continue;
    const double mag = std::exp(-k * log_z + lr);
    const double term = -((k % 2 == 0) ? 1.0 : -1.0) * sign * mag;
    sum += term;
    if (first == 0.0) first = mag;
    last = mag;
  }
  if (first != 0.0 && last != first && !(last < first)) {
    std::ostringstream os;
    os << "ml_asymptotic_negative: divergent truncation at z_mod=" << z_mod << " with " << n_terms
       << " terms";
    throw ConvergenceError(os.str());
  }
  return sum;
}

}  // namespace subjtime
