#include <mpfr.h>

#include <cmath>
#include <unordered_map>
#include <vector>

#include "detail/er.hpp"
#include "treeload/errors.hpp"
#include "treeload/exact.hpp"

namespace treeload::detail {

namespace {

constexpr std::int64_t kExactMarginalTau = 200;

double round_rational(const mpq_class& v) {
  mpfr_t r;
  mpfr_init2(r, 53);
  mpfr_set_q(r, v.get_mpq_t(), MPFR_RNDN);
  const double d = mpfr_get_d(r, MPFR_RNDN);
  mpfr_clear(r);
  return d;
}

mpq_class pow2_inv(std::int64_t e) {
  mpz_class d = 1;
  d <<= static_cast<mp_bitcnt_t>(e);
  return mpq_class(mpz_class(1), d);
}

mpz_class factorial(std::int64_t n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

// Exact P_tau(q) for q = 0..tau-1 at alpha = 0.
std::vector<mpq_class> exact_marginal_q(std::int64_t tau) {
  std::vector<mpq_class> out(static_cast<std::size_t>(tau));
  const mpq_class pre(tau + 1, tau);
  const mpz_class fact = factorial(tau + 1);
  mpq_class c = 0;  // coefficient of alpha^{q-1} in (1+alpha)_{tau-1} / (2-alpha)
  out[0] = pre * pow2_inv(1);
  for (std::int64_t q = 1; q < tau; ++q) {
    const std::int64_t i = q - 1;
    c = (c + mpq_class(rising_coefficient(static_cast<int>(tau), static_cast<int>(i + 1)))) / 2;
    out[static_cast<std::size_t>(q)] = pre * (pow2_inv(q + 1) - c / fact);
  }
  return out;
}

// Per-thread memo of the table for the last tau.
const std::vector<mpq_class>& exact_marginal_q_cached(std::int64_t tau) {
  thread_local std::int64_t last = -1;
  thread_local std::vector<mpq_class> table;
  if (last != tau) {
    table = exact_marginal_q(tau);
    last = tau;
  }
  return table;
}

const std::vector<double>& indegree_tail_cached(std::int64_t tau) {
  thread_local std::int64_t last = -1;
  thread_local std::vector<double> table;
  if (last != tau) {
    table = er_indegree_tail(tau);
    last = tau;
  }
  return table;
}

// sum_k |s(n-1,k)| C(k,q-1) / (n+2)!, the tau-free part of P(n, q).
const mpq_class& exact_joint_core(std::int64_t n, std::int64_t q) {
  thread_local std::unordered_map<std::uint64_t, mpq_class> memo;
  const std::uint64_t key = (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(q);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  mpz_class acc = 0;
  mpz_class binom = 1;  // C(k, q-1), starting at k = q-1
  for (std::int64_t k = q - 1; k <= n - 1; ++k) {
    if (k > q - 1) binom = binom * k / (k - q + 1);
    acc += abs(stirling_first(static_cast<int>(n - 1), static_cast<int>(k))) * binom;
  }
  mpq_class v(acc, factorial(n + 2));
  v.canonicalize();
  return memo.emplace(key, std::move(v)).first->second;
}

}  // namespace

double er_p_joint(NetworkTime t, std::int64_t n, std::int64_t q) {
  const bool inf = t.is_infinite();
  const double pre = inf ? 1.0 : (static_cast<double>(t.value()) + 1.0) / static_cast<double>(t.value());
  if (q == 0) return n == 0 ? 0.5 * pre : 0.0;
  if (n - 1 <= stirling_table().n_max()) {
    mpq_class v = exact_joint_core(n, q);
    if (!inf) v *= mpq_class(t.value() + 1, t.value());
    v.canonicalize();
    return round_rational(v);
  }
  return pre * stationary_column(0.0, q, n)[static_cast<std::size_t>(n)];
}

double er_p_marginal_q(NetworkTime t, std::int64_t q) {
  if (t.is_infinite()) return std::ldexp(1.0, static_cast<int>(-q - 1));
  const std::int64_t tau = t.value();
  if (tau <= kExactMarginalTau) return round_rational(exact_marginal_q_cached(tau)[static_cast<std::size_t>(q)]);
  const std::vector<double>& tail = indegree_tail_cached(tau);
  const double tq = static_cast<std::size_t>(q) < tail.size() ? tail[static_cast<std::size_t>(q)] : 0.0;
  return (static_cast<double>(tau) + 1.0) / static_cast<double>(tau) * std::ldexp(tq, static_cast<int>(-q - 1));
}

double er_ccdf_q(NetworkTime t, std::int64_t q) {
  if (t.is_infinite()) return std::ldexp(1.0, static_cast<int>(-q));
  const std::int64_t tau = t.value();
  if (tau <= kExactMarginalTau) {
    const auto& pm = exact_marginal_q_cached(tau);
    mpq_class acc = 0;
    for (std::int64_t j = q; j < tau; ++j) acc += pm[static_cast<std::size_t>(j)];
    return round_rational(acc);
  }
  const std::vector<double>& tail = indegree_tail_cached(tau);
  double acc = 0.0;
  const std::int64_t top = std::min<std::int64_t>(tau - 1, static_cast<std::int64_t>(tail.size()) - 1);
  for (std::int64_t j = top; j >= q; --j)
    acc += std::ldexp(tail[static_cast<std::size_t>(j)], static_cast<int>(-j - 1));
  return (static_cast<double>(tau) + 1.0) / static_cast<double>(tau) * acc;
}

}  // namespace treeload::detail
