#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "detail/mpreal.hpp"
#include "detail/real_ops.hpp"
#include "treeload/errors.hpp"
#include "treeload/specialfn.hpp"

namespace treeload::detail {

template <class R>
using SL = BasicSignedLog<R>;

template <class R>
SL<R> sl_zero() {
  return SL<R>{0, R(0.0), 1.0};
}

template <class R>
SL<R> sl_one() {
  return SL<R>{1, R(0.0), 0.0};
}

template <class R>
SL<R> sl_from(const R& v, double cond = 1.0) {
  const int s = num::sign_of(v);
  if (s == 0) return sl_zero<R>();
  R lg = num::log(num::abs(v));
  return SL<R>{s, lg, cond + std::fabs(num::to_double(lg))};
}

template <class R>
SL<R> sl_mul(const SL<R>& a, const SL<R>& b) {
  // a zero keeps its cond: one born of cancellation must stay unacceptable
  if (a.sign == 0 || b.sign == 0) return SL<R>{0, R(0.0), a.cond + b.cond + 1.0};
  return SL<R>{a.sign * b.sign, a.log_magnitude + b.log_magnitude, a.cond + b.cond + 1.0};
}

template <class R>
SL<R> sl_div(const SL<R>& a, const SL<R>& b) {
  if (b.sign == 0) throw NumericIntegrityError("division by zero in signed-log arithmetic");
  if (a.sign == 0) return SL<R>{0, R(0.0), a.cond + b.cond + 1.0};
  return SL<R>{a.sign * b.sign, a.log_magnitude - b.log_magnitude, a.cond + b.cond + 1.0};
}

template <class R>
SL<R> sl_neg(SL<R> a) {
  a.sign = -a.sign;
  return a;
}

template <class R>
R sl_value(const SL<R>& a) {
  if (a.sign == 0) return R(0.0);
  R v = num::exp(a.log_magnitude);
  return a.sign < 0 ? R(-v) : v;
}

inline SignedLogReal sl_to_double(const SL<double>& a) { return a; }
inline SignedLogReal sl_to_double(const SL<MpReal>& a) {
  return SignedLogReal{a.sign, a.log_magnitude.to_double(), a.cond};
}

struct SumInfo {
  double cancellation_ratio = 1.0;  // |sum| / sum |terms|
  double max_ratio = 1.0;           // |sum| / max |term|
};

// Sum of signed-log terms scaled to the largest one; Neumaier compensation in
// double. The result's cond is the error-weighted magnitude over |sum|.
template <class R>
SL<R> sl_sum(std::span<const SL<R>> terms, SumInfo* info = nullptr) {
  bool any = false;
  R top(0.0);
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    if (!any || t.log_magnitude > top) top = t.log_magnitude;
    any = true;
  }
  if (info) *info = SumInfo{};
  if (!any) return sl_zero<R>();
  R s(0.0);
  R comp(0.0);
  double abs_sum = 0.0;
  double weighted = 0.0;
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    R x = num::exp(R(t.log_magnitude - top));
    const double xd = num::to_double(x);
    abs_sum += xd;
    weighted += xd * (t.cond + 1.0);
    if (t.sign < 0) x = -x;
    if constexpr (std::is_same_v<R, double>) {
      const double nt = s + x;
      if (std::fabs(s) >= std::fabs(x))
        comp += (s - nt) + x;
      else
        comp += (x - nt) + s;
      s = nt;
    } else {
      s += x;
    }
  }
  if constexpr (std::is_same_v<R, double>) s += comp;
  const int sg = num::sign_of(s);
  if (sg == 0) {
    if (info) *info = SumInfo{0.0, 0.0};
    return SL<R>{0, R(0.0), std::numeric_limits<double>::infinity()};
  }
  R ls = num::log(num::abs(s));
  const double lsd = num::to_double(ls);
  if (info) {
    info->cancellation_ratio = std::min(1.0, std::exp(lsd - std::log(abs_sum)));
    info->max_ratio = std::exp(lsd);
  }
  const double cond = std::exp(std::log(weighted + static_cast<double>(terms.size())) - lsd);
  return SL<R>{sg, top + ls, cond};
}

template <class R>
SL<R> sl_add(const SL<R>& a, const SL<R>& b) {
  const std::array<SL<R>, 2> t{a, b};
  return sl_sum<R>(std::span<const SL<R>>(t));
}

// Coefficients of the affine form c + a*alpha + k*j + ak*alpha*j.
struct Affine {
  double c = 0.0, a = 0.0, k = 0.0, ak = 0.0;
};

template <class R>
struct AffineValue {
  R value;
  double scale;  // sum of absolute contributions, for conditioning
};

template <class R>
AffineValue<R> eval_affine(const Affine& f, const R& alpha, std::int64_t j) {
  R v(f.c);
  const double ad = num::to_double(alpha);
  double scale = std::fabs(f.c);
  if (f.a != 0.0) {
    v += R(f.a) * alpha;
    scale += std::fabs(f.a * ad);
  }
  if (f.k != 0.0) {
    v += R(f.k * static_cast<double>(j));
    scale += std::fabs(f.k * static_cast<double>(j));
  }
  if (f.ak != 0.0) {
    v += R(f.ak * static_cast<double>(j)) * alpha;
    scale += std::fabs(f.ak * static_cast<double>(j) * ad);
  }
  return {v, scale};
}

template <class R>
inline constexpr std::int64_t kDirectProductLimit = std::is_same_v<R, double> ? 32 : 512;

// (x)_m / (y)_my in signed-log form. y must be positive. The factor list is
// multiplied directly for short products; long ones go through log-gamma
// differences of large arguments.
template <class R>
SL<R> poch_ratio(const R& x, double x_scale, std::int64_t m, const R& y, std::int64_t my) {
  if (m > 0 && num::is_nonpositive_integer(x) && num::to_double(-x) < static_cast<double>(m))
    return sl_zero<R>();
  const std::int64_t len = std::max(m, my);
  const double xd = num::to_double(x);
  if (len <= kDirectProductLimit<R> || xd + static_cast<double>(m) <= 1.0) {
    int sign = 1;
    double cond = 0.0;
    if constexpr (std::is_same_v<R, double>) {
      double mant = 1.0;
      std::int64_t e2 = 0;
      for (std::int64_t j = 0; j < len; ++j) {
        if (j < m) {
          double f = x + static_cast<double>(j);
          cond += (x_scale + static_cast<double>(j)) / std::fabs(f) + 1.0;
          if (f < 0) {
            sign = -sign;
            f = -f;
          }
          mant *= f;
        }
        if (j < my) {
          mant /= (y + static_cast<double>(j));
          cond += 1.0;
        }
        if ((j & 15) == 15) {
          int e = 0;
          mant = std::frexp(mant, &e);
          e2 += e;
        }
      }
      const double lg = std::log(mant) + static_cast<double>(e2) * std::numbers::ln2;
      return SL<double>{sign, lg, cond + std::fabs(lg)};
    } else {
      R p(1.0);
      for (std::int64_t j = 0; j < len; ++j) {
        if (j < m) {
          R f = x + R(static_cast<long>(j));
          const double fd = std::fabs(f.to_double());
          cond += (x_scale + static_cast<double>(j)) / fd + 1.0;
          p *= f;
        }
        if (j < my) {
          p /= (y + R(static_cast<long>(j)));
          cond += 1.0;
        }
      }
      SL<R> out = sl_from(p, cond);
      return out;
    }
  }
  // (x)_m/(y)_my = [Gamma(x+m)/Gamma(y+my)] * [Gamma(y)/Gamma(x)]
  const R mmy(static_cast<double>(my));
  R big = num::lgamma_ratio(R(y + mmy), R((x - y) + R(static_cast<double>(m - my))));
  R small;
  int sign = 1;
  double cond = std::fabs(num::to_double(big));
  if (xd > 0.0) {
    small = num::lgamma_ratio(x, R(y - x));
  } else {
    int sx = 1;
    int sy = 1;
    R lx = num::lgamma_signed(x, &sx);
    R ly = num::lgamma_signed(y, &sy);
    small = ly - lx;
    sign = sx;
    cond += std::fabs(num::to_double(lx)) + x_scale / std::fabs(xd - std::nearbyint(xd) + 1e-300);
  }
  cond += std::fabs(num::to_double(small));
  return SL<R>{sign, big + small, cond};
}

template <class R>
SL<R> log_poch(const R& x, std::int64_t m) {
  return poch_ratio<R>(x, std::fabs(num::to_double(x)), m, R(1.0), 0);
}

// log(k!) in the working type.
template <class R>
R log_factorial(std::int64_t k) {
  int s = 1;
  return num::lgamma_signed(R(static_cast<double>(k + 1)), &s);
}

// Alternating kernel
//   sum_{k=k_begin}^{top} (-1)^k C(top,k) (x_k)_m / (y_k)_my / prod den_k
// with every factor affine in alpha and k.
struct AltSpec {
  std::int64_t top = 0;
  std::int64_t k_begin = 0;
  Affine x;
  std::int64_t m = 0;
  Affine y{1.0, 0.0, 0.0, 0.0};
  std::int64_t my = 0;
  std::array<Affine, 2> den{};
  int n_den = 0;
};

template <class R>
SL<R> alternating_sum(const AltSpec& s, const R& alpha, SumInfo* info = nullptr) {
  std::vector<SL<R>> terms;
  terms.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, s.top - s.k_begin + 1)));
  const R lf_top = log_factorial<R>(s.top);
  const double lf_cond = std::fabs(num::to_double(lf_top));
  // log C(top,k), stepped by the ratio (top-k)/(k+1)
  R lb = lf_top - log_factorial<R>(s.k_begin) - log_factorial<R>(s.top - s.k_begin);
  for (std::int64_t k = s.k_begin; k <= s.top; ++k) {
    if (k > s.k_begin) lb += num::log(R(static_cast<double>(s.top - k + 1)) / R(static_cast<double>(k)));
    const auto xv = eval_affine(s.x, alpha, k);
    const auto yv = eval_affine(s.y, alpha, k);
    SL<R> t = poch_ratio<R>(xv.value, xv.scale, s.m, yv.value, s.my);
    if (t.sign == 0) continue;
    for (int d = 0; d < s.n_den; ++d) {
      const auto dv = eval_affine(s.den[d], alpha, k);
      t = sl_div(t, sl_from(dv.value, dv.scale / std::fabs(num::to_double(dv.value))));
    }
    t.log_magnitude += lb;
    t.cond += lf_cond + 2.0;
    if (k & 1) t.sign = -t.sign;
    terms.push_back(std::move(t));
  }
  return sl_sum<R>(std::span<const SL<R>>(terms), info);
}

// A zero with finite cond is structural (every term vanished); a zero that
// came out of cancellation carries infinite cond and is never accepted.
template <class R>
bool acceptable(const SL<R>& v, double max_cond) {
  if (v.sign == 0) return std::isfinite(v.cond);
  return v.cond <= max_cond;
}

// Double-precision attempt only; empty when its condition estimate is too
// large or the policy asks for more than 53 bits.
template <class F>
std::optional<SL<double>> try_double(const PrecisionPolicy& policy, F&& f) {
  if (policy.base_precision > 53) return std::nullopt;
  SL<double> v = f.template operator()<double>();
  if (acceptable(v, 1.0 / policy.cancellation_threshold)) return v;
  return std::nullopt;
}

// Evaluates `f` (a generic callable returning SL<R>) in double first, then at
// increasing MPFR precision until the propagated condition estimate fits.
template <class F>
Evaluation evaluate_escalating(const PrecisionPolicy& policy, F&& f, int forced_bits = 0,
                               const char* what = "closed form") {
  if (forced_bits <= 0 && policy.base_precision <= 53) {
    SL<double> v = f.template operator()<double>();
    if (acceptable(v, 1.0 / policy.cancellation_threshold))
      return Evaluation{v, std::min(1.0, 1.0 / v.cond), 53};
  }
  int bits = forced_bits > 0 ? forced_bits
                             : std::max(policy.escalation_precision, policy.base_precision);
  for (;;) {
    PrecisionScope scope(bits);
    SL<MpReal> v = f.template operator()<MpReal>();
    if (acceptable(v, std::ldexp(1.0, bits - 64)) || forced_bits > 0)
      return Evaluation{sl_to_double(v), std::min(1.0, 1.0 / v.cond), bits};
    if (bits >= policy.max_precision)
      throw NumericIntegrityError(std::string("unresolved cancellation in ") + what + " at " +
                                  std::to_string(bits) + " bits");
    bits = std::min(2 * bits, policy.max_precision);
  }
}

}  // namespace treeload::detail
