#pragma once

// Minimal RAII handle over an MPFR number. Every value carries its own
// precision, so there is no global precision state to race on.

#include <mpfr.h>

#include <utility>

namespace subjtime::detail {

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  BigFloat(mpfr_prec_t bits, double x) { mpfr_init2(v_, bits); mpfr_set_d(v_, x, MPFR_RNDN); }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }

  /// log2 of |x| (exponent); very negative for zero.
  long exponent2() const { return is_zero() ? -(1L << 40) : mpfr_get_exp(v_); }

 private:
  mpfr_t v_;
};

inline mpfr_prec_t digits_to_bits(double digits) {
  return static_cast<mpfr_prec_t>(digits * 3.3219280948873623) + 8;
}

}  // namespace subjtime::detail
