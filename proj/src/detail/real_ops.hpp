#pragma once

#include <algorithm>
#include <cmath>

#include "detail/mpreal.hpp"
#include "treeload/specialfn.hpp"

namespace treeload::detail::num {

inline double to_double(double x) { return x; }
inline double to_double(const MpReal& x) { return x.to_double(); }

inline double log(double x) { return std::log(x); }
inline double exp(double x) { return std::exp(x); }
inline double log1p(double x) { return std::log1p(x); }
inline double abs(double x) { return std::fabs(x); }

inline MpReal log(const MpReal& x) {
  MpReal r;
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}
inline MpReal exp(const MpReal& x) {
  MpReal r;
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}
inline MpReal log1p(const MpReal& x) {
  MpReal r;
  mpfr_log1p(r.get(), x.get(), MPFR_RNDN);
  return r;
}
inline MpReal abs(const MpReal& x) {
  MpReal r;
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}

inline int sign_of(double x) { return (x > 0) - (x < 0); }
inline int sign_of(const MpReal& x) { return x.sign(); }

inline bool is_nonpositive_integer(double x) { return x <= 0 && x == std::floor(x); }
inline bool is_nonpositive_integer(const MpReal& x) { return x.sign() <= 0 && x.is_integer(); }

inline double lgamma_signed(double x, int* sign) { return ::lgamma_r(x, sign); }
inline MpReal lgamma_signed(const MpReal& x, int* sign) {
  MpReal r;
  mpfr_lgamma(r.get(), sign, x.get(), MPFR_RNDN);
  return r;
}

inline double lgamma_ratio(double x, double s) { return log_gamma_ratio(x, s); }

// log Gamma(x+s) - log Gamma(x), with guard bits so the difference of two
// large log-gammas keeps the working precision.
inline MpReal lgamma_ratio(const MpReal& x, const MpReal& s) {
  const mpfr_prec_t prec = MpReal::working_precision();
  const double top = std::max(2.0, std::fabs(x.to_double()) + std::fabs(s.to_double()));
  const auto extra = static_cast<mpfr_prec_t>(16 + std::log2(top * std::log(top) + 2.0));
  MpReal out;
  {
    PrecisionScope guard(prec + extra);
    MpReal xs = x + s;
    int sg = 0;
    MpReal a = lgamma_signed(xs, &sg);
    MpReal b = lgamma_signed(MpReal(x), &sg);
    out = a - b;
  }
  MpReal rounded;
  mpfr_set(rounded.get(), out.get(), MPFR_RNDN);
  return rounded;
}

inline double digamma(double x) { return treeload::digamma(x); }
inline MpReal digamma(const MpReal& x) {
  MpReal r;
  mpfr_digamma(r.get(), x.get(), MPFR_RNDN);
  return r;
}

template <class R>
R euler_gamma();
template <>
inline double euler_gamma<double>() { return kEulerGamma; }
template <>
inline MpReal euler_gamma<MpReal>() {
  MpReal r;
  mpfr_const_euler(r.get(), MPFR_RNDN);
  return r;
}

// Working epsilon in log2 units for acceptance decisions.
template <class R>
int mantissa_bits();
template <>
inline int mantissa_bits<double>() { return 53; }
template <>
inline int mantissa_bits<MpReal>() { return static_cast<int>(MpReal::working_precision()); }

}  // namespace treeload::detail::num
