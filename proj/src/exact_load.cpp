#include <cmath>
#include <string>

#include "detail/er.hpp"
#include "detail/kernel.hpp"
#include "treeload/errors.hpp"
#include "treeload/exact.hpp"

namespace treeload {

namespace num = detail::num;

namespace {

using u128 = unsigned __int128;

std::uint64_t isqrt(u128 v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
  while (static_cast<u128>(r) * r > v) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= v) ++r;
  return r;
}

void check_tau(std::int64_t tau) {
  if (tau < 1) throw DomainError("tau must be positive");
}

double cond_column_sum(const ModelParams& p, std::int64_t tau, std::int64_t q, std::int64_t lo,
                       std::int64_t hi) {
  const std::vector<double> u = stationary_column(p.alpha, q, tau - 1);
  double total = 0.0;
  double part = 0.0;
  for (std::int64_t n = q; n < tau; ++n) {
    total += u[static_cast<std::size_t>(n)];
    if (n >= lo && n <= hi) part += u[static_cast<std::size_t>(n)];
  }
  return part / total;
}

}  // namespace

std::int64_t load_floor_index(std::uint64_t L, std::int64_t tau) {
  const u128 t1 = static_cast<u128>(tau) + 1;
  const u128 lhs = t1 * t1;
  const u128 four_l = static_cast<u128>(L) * 4;
  if (four_l > lhs) return tau;
  const std::uint64_t r = isqrt(lhs - four_l);
  // real root (tau-1-sqrt(D))/2; take its ceiling then correct by exact check
  std::int64_t n = (tau - 1 - static_cast<std::int64_t>(r)) / 2;
  if (n < 0) n = 0;
  while (n > 0 && betweenness_of(n - 1, tau) >= L) --n;
  while (n < tau && betweenness_of(n, tau) < L) ++n;
  return n;
}

std::uint64_t betweenness_of(std::int64_t n, std::int64_t tau) {
  check_tau(tau);
  if (n < 0 || n > tau - 1) throw DomainError("betweenness_of: n outside [0, tau-1]");
  return static_cast<std::uint64_t>(n + 1) * static_cast<std::uint64_t>(tau - n);
}

std::optional<std::int64_t> invert_betweenness(std::uint64_t L, std::int64_t tau) {
  check_tau(tau);
  if (L < 1) throw DomainError("invert_betweenness: L must be positive");
  const u128 t1 = static_cast<u128>(tau) + 1;
  const u128 lhs = t1 * t1;
  const u128 four_l = static_cast<u128>(L) * 4;
  if (four_l > lhs) return std::nullopt;
  const u128 disc = lhs - four_l;
  const std::uint64_t r = isqrt(disc);
  if (static_cast<u128>(r) * r != disc) return std::nullopt;
  const std::int64_t twice = tau - 1 - static_cast<std::int64_t>(r);
  if (twice < 0 || twice % 2 != 0) return std::nullopt;
  return twice / 2;
}

double p_load_given_q(const ModelParams& p, std::int64_t tau, std::uint64_t L, std::int64_t q) {
  check_tau(tau);
  const auto nl = invert_betweenness(L, tau);
  if (!nl) return 0.0;
  const NetworkTime t = NetworkTime::finite(tau);
  const std::int64_t mirror = tau - 1 - *nl;
  double v = cond_n_given_q(p, t, *nl, q);
  if (mirror != *nl) v += cond_n_given_q(p, t, mirror, q);
  return detail::checked_probability(v, "p_load_given_q");
}

double p_load(const ModelParams& p, std::int64_t tau, std::uint64_t L) {
  check_tau(tau);
  const auto nl = invert_betweenness(L, tau);
  if (!nl) return 0.0;
  const NetworkTime t = NetworkTime::finite(tau);
  const std::int64_t mirror = tau - 1 - *nl;
  double v = p_marginal_n(p, t, *nl);
  if (mirror != *nl) v += p_marginal_n(p, t, mirror);
  return detail::checked_probability(v, "p_load");
}

double ccdf_load_unconditional(const ModelParams& p, std::int64_t tau, std::uint64_t L) {
  p.validate();
  check_tau(tau);
  if (L < 1) throw DomainError("ccdf_load_unconditional: L must be positive");
  const std::int64_t nl = load_floor_index(L, tau);
  if (nl > tau - 1 - nl) return 0.0;
  if (nl == 0) return 1.0;
  if (p.is_star()) return 0.0;
  const double a = p.alpha;
  const double tt = static_cast<double>(tau);
  const double dn = static_cast<double>(nl);
  const double v = (tt + 1.0 - a) / tt * (1.0 - a) * (tt - 2.0 * dn) /
                   ((dn + 1.0 - a) * (tt - dn + 1.0 - a));
  return detail::checked_probability(v, "ccdf_load_unconditional");
}

double ccdf_load_given_q_finite(const ModelParams& p, std::int64_t tau, std::uint64_t L,
                                std::int64_t q) {
  p.validate();
  check_tau(tau);
  if (q < 0 || q >= tau || (p.is_star() && q > 0))
    throw ConditioningError("ccdf_load_given_q_finite: in-degree outside the support");
  const std::int64_t nl = load_floor_index(L, tau);
  if (nl > tau - 1 - nl) return 0.0;
  if (p.is_star()) return 1.0;
  return detail::checked_probability(cond_column_sum(p, tau, q, nl, tau - 1 - nl),
                                     "ccdf_load_given_q_finite");
}

namespace {

template <class R>
detail::SL<R> load_ccdf_inf(std::int64_t lambda, std::int64_t q, const R& a) {
  detail::AltSpec s;
  s.top = q;
  s.x = {0.0, 0.0, 0.0, -1.0};
  s.m = lambda - 1;
  s.y = {2.0, -1.0, 0.0, 0.0};
  s.my = lambda - 1;
  s.den[0] = {2.0, -1.0, 0.0, 1.0};
  s.n_den = 1;
  detail::SL<R> sum = detail::alternating_sum<R>(s, a);
  detail::SL<R> scale = detail::log_poch<R>(R(R(2.0) / a - R(1.0)), q + 1);
  scale.log_magnitude += detail::num::log(a) - detail::log_factorial<R>(q);
  return detail::sl_mul(sum, scale);
}

void require_interior_alpha(const ModelParams& p, const char* what) {
  p.validate();
  if (p.is_er() || p.is_star()) throw DomainError(std::string(what) + ": alpha must lie in (0,1)");
}

}  // namespace

double ccdf_load_given_q(const ModelParams& p, std::int64_t lambda, std::int64_t q) {
  require_interior_alpha(p, "ccdf_load_given_q");
  if (q < 0 || lambda < q + 1) throw DomainError("ccdf_load_given_q: need Lambda >= q+1");
  const double a = p.alpha;
  const Evaluation e = detail::evaluate_escalating(
      p.policy, [&]<class R>() { return load_ccdf_inf<R>(lambda, q, R(a)); }, 0, "load CCDF");
  return detail::checked_probability(to_real(e.value), "ccdf_load_given_q");
}

double ccdf_load_tail_coefficient(const ModelParams& p, std::int64_t q) {
  require_interior_alpha(p, "ccdf_load_tail_coefficient");
  if (q < 1) throw DomainError("ccdf_load_tail_coefficient: q must be positive");
  const double a = p.alpha;
  const double dq = static_cast<double>(q);
  const double lg = std::lgamma(dq + 2.0 / a) - std::lgamma(2.0 / a - 1.0) - std::lgamma(dq);
  return a * a * (1.0 - a) / 2.0 * std::exp(lg);
}

double ccdf_load_tail_coefficient_printed(const ModelParams& p, std::int64_t q) {
  require_interior_alpha(p, "ccdf_load_tail_coefficient_printed");
  const double a = p.alpha;
  const double lg = 2.0 / a * std::log(static_cast<double>(q)) - std::lgamma(2.0 / a - 1.0);
  return a * a * (1.0 - a) / 2.0 * std::exp(lg);
}

double ccdf_load_asymptotic(const ModelParams& p, double lambda, std::int64_t q) {
  if (!(lambda > 0.0)) throw DomainError("ccdf_load_asymptotic: Lambda must be positive");
  return ccdf_load_tail_coefficient_printed(p, q) / (lambda * lambda);
}

double ccdf_load_finite_size(const ModelParams& p, std::int64_t tau, std::int64_t lambda,
                             std::int64_t q) {
  check_tau(tau);
  const double f = ccdf_load_given_q(p, lambda, q);
  const double a = p.alpha;
  const double tt = static_cast<double>(tau);
  return f - (1.0 - f) * a * a * (1.0 - a) / (2.0 * tt * tt);
}

}  // namespace treeload
