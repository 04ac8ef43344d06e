#include "treeload/specialfn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "detail/kernel.hpp"
#include "treeload/errors.hpp"

namespace treeload {

using detail::MpReal;

SignedLogReal to_signed_log(double x) {
  if (x == 0.0) return SignedLogReal{0, 0.0, 1.0};
  return SignedLogReal{x > 0 ? 1 : -1, std::log(std::fabs(x)), 1.0};
}

double to_real(const SignedLogReal& v) {
  if (v.sign == 0) return 0.0;
  return v.sign * std::exp(v.log_magnitude);
}

SignedLogReal operator*(const SignedLogReal& a, const SignedLogReal& b) {
  return detail::sl_mul(a, b);
}

SignedLogReal operator/(const SignedLogReal& a, const SignedLogReal& b) {
  return detail::sl_div(a, b);
}

void PrecisionPolicy::validate() const {
  if (base_precision < 2) throw DomainError("base precision must be at least 2 bits");
  if (escalation_precision <= base_precision)
    throw DomainError("escalation precision must exceed base precision");
  if (!(cancellation_threshold > 0.0 && cancellation_threshold < 1.0))
    throw DomainError("cancellation threshold must lie in (0,1)");
  if (max_precision < escalation_precision)
    throw DomainError("maximum precision below escalation precision");
}

SignedLogReal pochhammer_int(double x, std::int64_t n) {
  if (n < 0) throw DomainError("pochhammer_int: negative order");
  if (n == 0) return SignedLogReal{1, 0.0, 0.0};
  if (x <= 0 && x == std::floor(x) && -x < static_cast<double>(n)) return SignedLogReal{0, 0.0, 1.0};
  constexpr std::int64_t kDirect = 1000000;
  if (n <= kDirect || x + static_cast<double>(n) <= 1.0) {
    int sign = 1;
    double mant = 1.0;
    std::int64_t e2 = 0;
    for (std::int64_t j = 0; j < n; ++j) {
      double f = x + static_cast<double>(j);
      if (f < 0) {
        sign = -sign;
        f = -f;
      }
      mant *= f;
      if ((j & 15) == 15) {
        int e = 0;
        mant = std::frexp(mant, &e);
        e2 += e;
      }
    }
    const double lg = std::log(mant) + static_cast<double>(e2) * std::numbers::ln2;
    return SignedLogReal{sign, lg, static_cast<double>(n) + std::fabs(lg)};
  }
  double lg = 0.0;
  int sign = 1;
  if (x > 0) {
    lg = log_gamma_ratio(x, static_cast<double>(n));
  } else {
    lg = std::lgamma(x + static_cast<double>(n)) - ::lgamma_r(x, &sign);
  }
  return SignedLogReal{sign, lg, std::fabs(lg)};
}

namespace {

// Bernoulli-number coefficients B_{2k} / (2k (2k-1)) of the Stirling series.
constexpr double kStirling[] = {1.0 / 12.0,       -1.0 / 360.0,  1.0 / 1260.0,
                                -1.0 / 1680.0,    1.0 / 1188.0,  -691.0 / 360360.0,
                                1.0 / 156.0,      -3617.0 / 122400.0};

double stirling_tail(double z) {
  const double z2 = 1.0 / (z * z);
  double acc = 0.0;
  for (int k = 7; k >= 0; --k) acc = acc * z2 + kStirling[k];
  return acc / z;
}

}  // namespace

double log_gamma_ratio(double x, double s) {
  if (!(x > 0.0) || !(x + s > 0.0)) throw DomainError("log_gamma_ratio: non-positive argument");
  if (s == 0.0) return 0.0;
  double acc = 0.0;
  while (std::min(x, x + s) < 16.0) {
    acc -= std::log1p(s / x);
    x += 1.0;
  }
  const double y = x + s;
  return acc + s * std::log(x) + (y - 0.5) * std::log1p(s / x) - s +
         (stirling_tail(y) - stirling_tail(x));
}

double pochhammer_frac(double x, double s) {
  if (!(x > 0.0)) throw DomainError("pochhammer_frac: x must be positive");
  if (s < 0.0 || s > 1.0) throw DomainError("pochhammer_frac: order must lie in [0,1]");
  if (s == 0.0) return 1.0;
  return std::exp(log_gamma_ratio(x, s));
}

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: x must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double z2 = 1.0 / (x * x);
  // Bernoulli terms B_{2k}/(2k x^{2k}), k = 1..7
  const double series =
      z2 * (1.0 / 12.0 -
            z2 * (1.0 / 120.0 -
                  z2 * (1.0 / 252.0 -
                        z2 * (1.0 / 240.0 - z2 * (1.0 / 132.0 - z2 * (691.0 / 32760.0 - z2 / 12.0))))));
  return acc + std::log(x) - 0.5 / x - series;
}

CompensatedSum compensated_sum(std::span<const SignedLogReal> terms, const PrecisionPolicy& policy) {
  detail::SumInfo info;
  SignedLogReal s = detail::sl_sum<double>(terms, &info);
  if (info.max_ratio >= policy.cancellation_threshold || terms.empty())
    return CompensatedSum{to_real(s), info.max_ratio};
  detail::PrecisionScope scope(policy.escalation_precision);
  std::vector<detail::SL<MpReal>> mp;
  mp.reserve(terms.size());
  for (const auto& t : terms) mp.push_back({t.sign, MpReal(t.log_magnitude), t.cond});
  detail::SumInfo mp_info;
  auto r = detail::sl_sum<MpReal>(std::span<const detail::SL<MpReal>>(mp), &mp_info);
  return CompensatedSum{to_real(detail::sl_to_double(r)), mp_info.max_ratio};
}

namespace {

template <class R>
detail::SL<R> sum_term_impl(std::int64_t n, std::int64_t q, const R& alpha) {
  detail::AltSpec spec;
  spec.top = q - 1;
  spec.x = detail::Affine{1.0, -1.0, 0.0, -1.0};
  spec.m = n - 1;
  auto s = detail::alternating_sum<R>(spec, alpha);
  auto scale = detail::sl_from<R>(alpha);
  scale.log_magnitude -= detail::log_factorial<R>(q - 1);
  return detail::sl_mul(s, scale);
}

}  // namespace

Evaluation sum_term_eval(std::int64_t n, std::int64_t q, double alpha, const PrecisionPolicy& policy,
                         int forced_bits) {
  if (n < 0 || q < 0) throw DomainError("sum_term: negative index");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sum_term: alpha must lie in (0,1]");
  if (q > n) return Evaluation{SignedLogReal{0, 0.0, 1.0}, 1.0, 53};
  if (q == 0) return Evaluation{n == 0 ? SignedLogReal{1, 0.0, 0.0} : SignedLogReal{0, 0.0, 1.0}, 1.0, 53};
  return detail::evaluate_escalating(
      policy,
      [&]<class R>() { return sum_term_impl<R>(n, q, R(alpha)); },
      forced_bits, "sum term");
}

double sum_term(std::int64_t n, std::int64_t q, double alpha, const PrecisionPolicy& policy) {
  return to_real(sum_term_eval(n, q, alpha, policy).value);
}

}  // namespace treeload
