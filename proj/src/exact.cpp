#include "treeload/exact.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "detail/er.hpp"
#include "detail/kernel.hpp"
#include "treeload/errors.hpp"

namespace treeload {

using detail::AltSpec;
using detail::MpReal;
using detail::SL;
namespace num = detail::num;

namespace {

constexpr double kClampSlack = 1e-9;


template <class R>
SL<R> positive_log(const R& lg) {
  return SL<R>{1, lg, 1.0 + std::fabs(num::to_double(lg))};
}

template <class R>
R prefactor(std::int64_t tau, const R& a) {
  return (R(static_cast<double>(tau) + 1.0) - a) / R(static_cast<double>(tau));
}

// P_inf(n, q) = (1/a-1)_q / (2-a)_{n+1} * S(n, q) for 1 <= q <= n.
template <class R>
SL<R> joint_inf(std::int64_t n, std::int64_t q, const R& a) {
  AltSpec s;
  s.top = q - 1;
  s.x = {1.0, -1.0, 0.0, -1.0};
  s.m = n - 1;
  s.y = {2.0, -1.0, 0.0, 0.0};
  s.my = n + 1;
  SL<R> sum = detail::alternating_sum<R>(s, a);
  SL<R> pre = detail::log_poch<R>(R(1.0) / a - R(1.0), q);
  pre = detail::sl_mul(pre, detail::sl_from<R>(a));
  pre.log_magnitude -= detail::log_factorial<R>(q - 1);
  return detail::sl_mul(sum, pre);
}

// First (Rice) term of the in-degree marginal without the tau prefactor.
template <class R>
SL<R> marginal_q_inf(std::int64_t q, const R& a) {
  const R inv = R(1.0) / a;
  const R lg = num::lgamma_ratio(R(inv - R(1.0)), inv) -
               num::lgamma_ratio(R(R(static_cast<double>(q)) + inv - R(1.0)), R(inv + R(1.0))) +
               num::log(inv);
  return positive_log(lg);
}

template <class R>
SL<R> marginal_q_finite(std::int64_t tau, std::int64_t q, const R& a) {
  SL<R> t1 = marginal_q_inf<R>(q, a);
  AltSpec s;
  s.top = q;
  s.x = {0.0, 0.0, 0.0, -1.0};
  s.m = tau;
  s.y = {2.0, -1.0, 0.0, 0.0};
  s.my = tau;
  s.den[0] = {2.0, -1.0, 0.0, 1.0};
  s.n_den = 1;
  SL<R> t2 = detail::alternating_sum<R>(s, a);
  SL<R> pre = detail::log_poch<R>(R(1.0) / a - R(1.0), q);
  pre.log_magnitude -= detail::log_factorial<R>(q);
  t2 = detail::sl_mul(t2, pre);
  SL<R> diff = detail::sl_add(t1, detail::sl_neg(t2));
  return detail::sl_mul(diff, detail::sl_from<R>(prefactor<R>(tau, a)));
}

template <class R>
SL<R> ccdf_q_inf(std::int64_t q, const R& a) {
  const R inv = R(1.0) / a;
  const R lg = num::lgamma_ratio(R(inv - R(1.0)), inv) -
               num::lgamma_ratio(R(R(static_cast<double>(q)) + inv - R(1.0)), inv);
  return positive_log(lg);
}

template <class R>
SL<R> ccdf_q_finite(std::int64_t tau, std::int64_t q, const R& a) {
  const SL<R> pre = detail::sl_from<R>(prefactor<R>(tau, a));
  std::vector<SL<R>> parts;
  parts.push_back(detail::sl_mul(pre, ccdf_q_inf<R>(q, a)));
  parts.push_back(detail::sl_neg(detail::sl_from<R>(R((R(1.0) - a) / R(static_cast<double>(tau))))));
  if (q >= 2) {
    AltSpec s;
    s.top = q - 2;
    s.x = {1.0, -1.0, 0.0, -1.0};
    s.m = tau - 1;
    s.y = {2.0, -1.0, 0.0, 0.0};
    s.my = tau;
    s.den[0] = {1.0, 0.0, 0.0, 1.0};
    s.den[1] = {2.0, 0.0, 0.0, 1.0};
    s.n_den = 2;
    SL<R> t3 = detail::alternating_sum<R>(s, a);
    SL<R> scale = detail::log_poch<R>(R(1.0) / a - R(1.0), q);
    scale.log_magnitude += R(2.0) * num::log(a) - detail::log_factorial<R>(q - 2);
    parts.push_back(detail::sl_mul(detail::sl_mul(t3, scale), pre));
  }
  return detail::sl_sum<R>(std::span<const SL<R>>(parts));
}

// (1-a) (q+1/a)_{1/a} / (1/a-1)_{1/a} = E_inf[n+2-a | q]
template <class R>
SL<R> mean_shift_inf(std::int64_t q, const R& a) {
  const R inv = R(1.0) / a;
  const R lg = num::lgamma_ratio(R(R(static_cast<double>(q)) + inv), inv) -
               num::lgamma_ratio(R(inv - R(1.0)), inv) + num::log(R(R(1.0) - a));
  return positive_log(lg);
}

// 1 - (c/a-1)_{q+1}/q! * a * sum_k (-1)^k C(q,k) (-ak)_tau / (c-a)_tau / (ak+c-a)
template <class R>
SL<R> g_factor(std::int64_t tau, std::int64_t q, const R& a, double c) {
  AltSpec s;
  s.top = q;
  s.x = {0.0, 0.0, 0.0, -1.0};
  s.m = tau;
  s.y = {c, -1.0, 0.0, 0.0};
  s.my = tau;
  s.den[0] = {c, -1.0, 0.0, 1.0};
  s.n_den = 1;
  SL<R> sum = detail::alternating_sum<R>(s, a);
  SL<R> scale = detail::log_poch<R>(R(R(c) / a - R(1.0)), q + 1);
  scale.log_magnitude += num::log(a) - detail::log_factorial<R>(q);
  SL<R> x = detail::sl_mul(sum, scale);
  return detail::sl_add(detail::sl_one<R>(), detail::sl_neg(x));
}

template <class R>
SL<R> mean_n_finite(std::int64_t tau, std::int64_t q, const R& a) {
  SL<R> e1 = mean_shift_inf<R>(q, a);
  e1 = detail::sl_mul(e1, g_factor<R>(tau, q, a, 1.0));
  e1 = detail::sl_div(e1, g_factor<R>(tau, q, a, 2.0));
  return detail::sl_add(e1, detail::sl_neg(detail::sl_from<R>(R(R(2.0) - a))));
}

// E[(n+2-a)(n+1-a) | q] for 1 <= q < tau.
template <class R>
SL<R> second_moment_finite(std::int64_t tau, std::int64_t q, const R& a) {
  const R one(1.0);
  const R lf = detail::log_factorial<R>(q - 1);
  R harmonic(0.0);
  for (std::int64_t j = 1; j < q; ++j) harmonic += one / R(static_cast<double>(j));
  const R w = (one - a) * a;
  const R psi_hi = num::digamma(R(R(static_cast<double>(tau)) - a));
  const R psi_lo = num::digamma(R(one - a));
  std::vector<SL<R>> parts;
  auto push = [&](const R& v, double cond) {
    SL<R> t = detail::sl_from<R>(v, cond);
    t.log_magnitude -= lf;
    parts.push_back(t);
  };
  push(w * psi_hi, 2.0 + std::fabs(num::to_double(psi_hi)));
  push(-(w * psi_lo), 2.0 + std::fabs(num::to_double(psi_lo)));
  if (q > 1) push(-((one - a) * harmonic), static_cast<double>(q));
  if (q >= 2) {
    AltSpec s;
    s.top = q;
    s.k_begin = 2;
    s.x = {0.0, 0.0, 0.0, -1.0};
    s.m = tau;
    s.y = {2.0, -1.0, 0.0, 0.0};
    s.my = tau - 2;
    s.den[0] = {-1.0, 0.0, 1.0, 0.0};
    s.n_den = 1;
    SL<R> c = detail::alternating_sum<R>(s, a);
    c.log_magnitude -= num::log(a) + detail::log_factorial<R>(q);
    parts.push_back(detail::sl_neg(c));
  }
  SL<R> inner = detail::sl_sum<R>(std::span<const SL<R>>(parts));
  SL<R> scale = detail::log_poch<R>(R(one / a - one), q);
  scale = detail::sl_mul(scale, detail::sl_from<R>(prefactor<R>(tau, a)));
  return detail::sl_div(detail::sl_mul(inner, scale), marginal_q_finite<R>(tau, q, a));
}

template <class F>
double run(const ModelParams& p, const char* what, F&& f) {
  return to_real(detail::evaluate_escalating(p.policy, std::forward<F>(f), 0, what).value);
}

// Closed form in double when its condition estimate allows. Otherwise the
// default policy takes `fallback`, a positive-term evaluation through the
// stationary recurrence, and a policy asking for extra bits gets the escalated
// closed form.
template <class F, class G>
double resolve(const ModelParams& p, const char* what, F&& closed, G&& fallback) {
  if (auto v = detail::try_double(p.policy, closed)) return to_real(*v);
  if (p.policy.base_precision <= 53) return fallback();
  return run(p, what, closed);
}

// P_inf(n, q) for 0 < alpha < 1.
double stationary_u(const ModelParams& p, std::int64_t n, std::int64_t q) {
  const double a = p.alpha;
  if (q < 0 || q > n) return 0.0;
  if (q == 0) return n == 0 ? 1.0 / (2.0 - a) : 0.0;
  return resolve(p, "joint distribution", [&]<class R>() { return joint_inf<R>(n, q, R(a)); },
                 [&] { return detail::stationary_point(a, n, q); });
}

void require_interior(const ModelParams& p, const char* what) {
  if (p.is_er() || p.is_star())
    throw DomainError(std::string(what) + ": alpha must lie in (0,1)");
}

void require_infinite_ok(const ModelParams& p, NetworkTime t) {
  if (t.is_infinite() && p.is_star())
    throw DomainError("infinite network is undefined for the star limit alpha = 1");
}

}  // namespace

namespace detail {

double checked_probability(double raw, const char* what) {
  if (!(raw >= -kClampSlack && raw <= 1.0 + kClampSlack))
    throw NumericIntegrityError(std::string(what) + ": probability " + std::to_string(raw) +
                                " outside [0,1]");
  return std::min(1.0, std::max(0.0, raw));
}

ColumnMoments column_moments(double alpha, std::int64_t tau, std::int64_t q) {
  const std::vector<double> u = stationary_column(alpha, q, tau - 1);
  ColumnMoments m;
  for (std::int64_t n = q; n < tau; ++n) {
    const double v = u[static_cast<std::size_t>(n)];
    const double dn = static_cast<double>(n);
    m.m0 += v;
    m.m1 += dn * v;
    m.m2 += dn * dn * v;
  }
  return m;
}

}  // namespace detail

double p_specific(const ModelParams& p, std::int64_t tau_e, std::int64_t tau, std::int64_t n,
                  std::int64_t q) {
  p.validate();
  if (tau_e < 1 || tau < tau_e) throw DomainError("p_specific: need 1 <= tau_e <= tau");
  if (p.is_er()) throw DomainError("p_specific: alpha must lie in (0,1]");
  if (q < 0 || n < q || n > tau - tau_e) return 0.0;
  if (p.is_star()) return (n == 0 && q == 0) ? 1.0 : 0.0;
  const double a = p.alpha;
  const double te = static_cast<double>(tau_e);
  const double t = static_cast<double>(tau);
  const double dn = static_cast<double>(n);
  // P_inf(n, q) (2-a)_{n+1} carries the whole (n, q) dependence
  const double lg = log_gamma_ratio(t - te - dn + 1.0, dn) + log_gamma_ratio(te, t - dn - te) -
                    std::lgamma(dn + 1.0) - log_gamma_ratio(te + 1.0 - a, t - te) +
                    pochhammer_int(2.0 - a, n + 1).log_magnitude;
  return detail::checked_probability(std::exp(lg) * stationary_u(p, n, q), "p_specific");
}

double p_joint(const ModelParams& p, NetworkTime t, std::int64_t n, std::int64_t q) {
  p.validate();
  require_infinite_ok(p, t);
  if (q < 0 || n < q) return 0.0;
  if (!t.is_infinite() && n >= t.value()) return 0.0;
  if (p.is_star()) return (n == 0 && q == 0) ? 1.0 : 0.0;
  if (p.is_er()) return detail::checked_probability(detail::er_p_joint(t, n, q), "p_joint");
  const double a = p.alpha;
  const double pre = t.is_infinite() ? 1.0 : (static_cast<double>(t.value()) + 1.0 - a) / static_cast<double>(t.value());
  return detail::checked_probability(pre * stationary_u(p, n, q), "p_joint");
}

double p_marginal_n(const ModelParams& p, NetworkTime t, std::int64_t n) {
  p.validate();
  if (t.is_infinite() && p.is_star()) throw DomainError("p_marginal_n: infinite network needs alpha < 1");
  if (n < 0) return 0.0;
  const double a = p.alpha;
  const double base = (1.0 - a) / ((static_cast<double>(n) + 1.0 - a) * (static_cast<double>(n) + 2.0 - a));
  if (t.is_infinite()) return base;
  const std::int64_t tau = t.value();
  if (n >= tau) return 0.0;
  if (p.is_star()) return n == 0 ? 1.0 : 0.0;
  return detail::checked_probability((static_cast<double>(tau) + 1.0 - a) / static_cast<double>(tau) * base,
                                     "p_marginal_n");
}

double p_marginal_q(const ModelParams& p, NetworkTime t, std::int64_t q) {
  p.validate();
  require_infinite_ok(p, t);
  if (q < 0) throw DomainError("p_marginal_q: negative in-degree");
  if (!t.is_infinite() && q >= t.value()) return 0.0;
  if (p.is_star()) return q == 0 ? 1.0 : 0.0;
  if (p.is_er()) return detail::checked_probability(detail::er_p_marginal_q(t, q), "p_marginal_q");
  const double a = p.alpha;
  double v = 0.0;
  if (t.is_infinite()) {
    v = run(p, "in-degree marginal", [&]<class R>() { return marginal_q_inf<R>(q, R(a)); });
  } else {
    const std::int64_t tau = t.value();
    v = resolve(p, "in-degree marginal", [&]<class R>() { return marginal_q_finite<R>(tau, q, R(a)); },
                [&] { return prefactor(tau, a) * detail::column_moments(a, tau, q).m0; });
  }
  return detail::checked_probability(v, "p_marginal_q");
}

double ccdf_n(const ModelParams& p, NetworkTime t, std::int64_t n) {
  p.validate();
  const double a = p.alpha;
  if (t.is_infinite()) {
    if (p.is_star()) throw DomainError("ccdf_n: infinite network needs alpha < 1");
    if (n < 0) throw DomainError("ccdf_n: negative cluster index");
    return (1.0 - a) / (static_cast<double>(n) + 1.0 - a);
  }
  const std::int64_t tau = t.value();
  if (n < 0 || n >= tau) throw DomainError("ccdf_n: n outside [0, tau)");
  if (n == 0) return 1.0;
  if (p.is_star()) return 0.0;
  const double tt = static_cast<double>(tau);
  // (tau+1-a)(1-a)/tau [1/(n+1-a) - 1/(tau+1-a)], written without the subtraction
  const double v = (1.0 - a) * (tt - static_cast<double>(n)) / (tt * (static_cast<double>(n) + 1.0 - a));
  return detail::checked_probability(v, "ccdf_n");
}

double ccdf_q(const ModelParams& p, NetworkTime t, std::int64_t q) {
  p.validate();
  require_infinite_ok(p, t);
  if (q < 0) throw DomainError("ccdf_q: negative in-degree");
  if (!t.is_infinite() && q >= t.value()) throw DomainError("ccdf_q: q outside [0, tau)");
  if (q == 0) return 1.0;
  if (p.is_star()) return 0.0;
  if (p.is_er()) return detail::checked_probability(detail::er_ccdf_q(t, q), "ccdf_q");
  const double a = p.alpha;
  double v = 0.0;
  if (t.is_infinite()) {
    v = run(p, "in-degree CCDF", [&]<class R>() { return ccdf_q_inf<R>(q, R(a)); });
  } else {
    const std::int64_t tau = t.value();
    v = resolve(p, "in-degree CCDF", [&]<class R>() { return ccdf_q_finite<R>(tau, q, R(a)); },
                [&] { return prefactor(tau, a) * detail::stationary_tail_mass(a, tau, q); });
  }
  return detail::checked_probability(v, "ccdf_q");
}

double cond_n_given_q(const ModelParams& p, NetworkTime t, std::int64_t n, std::int64_t q) {
  const double m = p_marginal_q(p, t, q);
  if (!(m > 0.0)) throw ConditioningError("cond_n_given_q: in-degree marginal vanishes at q = " + std::to_string(q));
  if (n < q) return 0.0;
  return detail::checked_probability(p_joint(p, t, n, q) / m, "cond_n_given_q");
}

double cond_q_given_n(const ModelParams& p, NetworkTime t, std::int64_t q, std::int64_t n) {
  const double m = p_marginal_n(p, t, n);
  if (!(m > 0.0)) throw ConditioningError("cond_q_given_n: cluster-size marginal vanishes at n = " + std::to_string(n));
  if (q < 0 || q > n) return 0.0;
  return detail::checked_probability(p_joint(p, t, n, q) / m, "cond_q_given_n");
}

namespace {

void require_q_support(const ModelParams& p, NetworkTime t, std::int64_t q, const char* what) {
  if (q < 0 || (!t.is_infinite() && q >= t.value()) || (p.is_star() && q > 0))
    throw ConditioningError(std::string(what) + ": in-degree outside the support");
}

}  // namespace

double mean_n_given_q(const ModelParams& p, NetworkTime t, std::int64_t q) {
  p.validate();
  require_infinite_ok(p, t);
  require_q_support(p, t, q, "mean_n_given_q");
  if (q == 0) return 0.0;
  if (p.is_er()) {
    if (t.is_infinite()) return std::ldexp(1.0, static_cast<int>(q + 1)) - 2.0;
    const auto m = detail::column_moments(0.0, t.value(), q);
    return m.m1 / m.m0;
  }
  const double a = p.alpha;
  if (t.is_infinite()) {
    return run(p, "conditional mean", [&]<class R>() {
      return detail::sl_add(mean_shift_inf<R>(q, R(a)), detail::sl_neg(detail::sl_from<R>(R(2.0 - a))));
    });
  }
  const std::int64_t tau = t.value();
  return resolve(p, "conditional mean", [&]<class R>() { return mean_n_finite<R>(tau, q, R(a)); }, [&] {
    const auto m = detail::column_moments(a, tau, q);
    return m.m1 / m.m0;
  });
}

double second_moment_n_given_q(const ModelParams& p, std::int64_t tau, std::int64_t q) {
  p.validate();
  const NetworkTime t = NetworkTime::finite(tau);
  require_q_support(p, t, q, "second_moment_n_given_q");
  const double a = p.alpha;
  if (q == 0) return (2.0 - a) * (1.0 - a);
  if (p.is_er()) {
    const auto m = detail::column_moments(0.0, tau, q);
    return (m.m2 + 3.0 * m.m1 + 2.0 * m.m0) / m.m0;
  }
  return resolve(p, "conditional second moment",
                 [&]<class R>() { return second_moment_finite<R>(tau, q, R(a)); }, [&] {
                   const auto m = detail::column_moments(a, tau, q);
                   const double c1 = 3.0 - 2.0 * a;
                   const double c0 = (2.0 - a) * (1.0 - a);
                   return (m.m2 + c1 * m.m1 + c0 * m.m0) / m.m0;
                 });
}

double mean_q_given_n(const ModelParams& p, std::int64_t n) {
  p.validate();
  if (n < 0) throw DomainError("mean_q_given_n: negative cluster index");
  if (n == 0) return 0.0;
  const double a = p.alpha;
  if (p.is_er()) return digamma(static_cast<double>(n) + 1.0) + kEulerGamma;
  if (p.is_star()) return static_cast<double>(n);
  return std::tgamma(2.0 - a) / a * pochhammer_frac(static_cast<double>(n) + 1.0 - a, a) - (1.0 / a - 1.0);
}

MeanClusterSize mean_cluster_size(const ModelParams& p, std::int64_t tau) {
  p.validate();
  if (tau < 1) throw DomainError("mean_cluster_size: tau must be positive");
  const double a = p.alpha;
  const double tt = static_cast<double>(tau);
  MeanClusterSize out;
  out.asymptotic = (1.0 - a) * std::log(tt);
  if (p.is_star()) return out;
  // sum_n n/((n+1-a)(n+2-a)) = psi(tau+2-a) - psi(2-a) - 1 + (1-a)/(tau+1-a)
  const double s = digamma(tt + 2.0 - a) - digamma(2.0 - a) - tt / (tt + 1.0 - a);
  out.exact = (tt + 1.0 - a) / tt * (1.0 - a) * s;
  return out;
}

double indegree_fluctuation_inf(const ModelParams& p) {
  p.validate();
  require_interior(p, "indegree_fluctuation_inf");
  if (p.alpha == 0.5) throw DivergenceError("in-degree fluctuations diverge at alpha = 1/2");
  return 2.0 / std::fabs(1.0 - 2.0 * p.alpha);
}

double mean_load_given_q(const ModelParams& p, NetworkTime t, std::int64_t q) {
  p.validate();
  require_infinite_ok(p, t);
  require_q_support(p, t, q, "mean_load_given_q");
  const double a = p.alpha;
  if (t.is_infinite()) {
    if (q == 0) return 1.0;
    if (p.is_er()) return std::ldexp(1.0, static_cast<int>(q + 1)) - 1.0;
    return run(p, "conditional load mean", [&]<class R>() {
      return detail::sl_add(mean_shift_inf<R>(q, R(a)), detail::sl_neg(detail::sl_from<R>(R(1.0 - a))));
    });
  }
  const std::int64_t tau = t.value();
  const double tt = static_cast<double>(tau);
  if (q == 0) return tt;
  if (p.is_er()) {
    const auto m = detail::column_moments(0.0, tau, q);
    // E[(n+1)(tau-n)] = (tau-1) E[n] + tau - E[n^2]
    return ((tt - 1.0) * m.m1 + tt * m.m0 - m.m2) / m.m0;
  }
  const double b = 1.0 - a;
  const double e1 = mean_n_given_q(p, t, q) + 2.0 - a;
  const double e2 = second_moment_n_given_q(p, tau, q);
  return tt * (e1 - b) - (e2 - 2.0 * b * e1 + b * (b + 1.0));
}

}  // namespace treeload
