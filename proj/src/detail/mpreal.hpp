#pragma once

#include <mpfr.h>

#include <utility>

namespace treeload::detail {

// Minimal RAII wrapper over mpfr_t. New values take the calling thread's
// working precision (see PrecisionScope).
class MpReal {
 public:
  static mpfr_prec_t working_precision() { return precision_ref(); }

  MpReal() {
    mpfr_init2(v_, working_precision());
    mpfr_set_zero(v_, 1);
  }
  MpReal(double d) {
    mpfr_init2(v_, working_precision());
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  MpReal(long i) {
    mpfr_init2(v_, working_precision());
    mpfr_set_si(v_, i, MPFR_RNDN);
  }
  MpReal(int i) : MpReal(static_cast<long>(i)) {}
  MpReal(const MpReal& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  MpReal(MpReal&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  MpReal& operator=(const MpReal& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  MpReal& operator=(MpReal&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~MpReal() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_integer() const { return mpfr_integer_p(v_) != 0; }

  MpReal& operator+=(const MpReal& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator-=(const MpReal& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator*=(const MpReal& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator/=(const MpReal& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend MpReal operator+(const MpReal& a, const MpReal& b) { MpReal r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend MpReal operator-(const MpReal& a, const MpReal& b) { MpReal r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend MpReal operator*(const MpReal& a, const MpReal& b) { MpReal r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend MpReal operator/(const MpReal& a, const MpReal& b) { MpReal r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend MpReal operator-(const MpReal& a) { MpReal r; mpfr_neg(r.v_, a.v_, MPFR_RNDN); return r; }

  friend bool operator<(const MpReal& a, const MpReal& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const MpReal& a, const MpReal& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const MpReal& a, const MpReal& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }

 private:
  static mpfr_prec_t& precision_ref() {
    thread_local mpfr_prec_t bits = 256;
    return bits;
  }
  friend class PrecisionScope;

  mpfr_t v_;
};

class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits) : saved_(MpReal::precision_ref()) {
    MpReal::precision_ref() = bits;
  }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;
  ~PrecisionScope() { MpReal::precision_ref() = saved_; }

 private:
  mpfr_prec_t saved_;
};

}  // namespace treeload::detail
