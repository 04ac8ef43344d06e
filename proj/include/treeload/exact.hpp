#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "treeload/model.hpp"

namespace treeload {

double p_specific(const ModelParams& p, std::int64_t tau_e, std::int64_t tau, std::int64_t n,
                  std::int64_t q);

double p_joint(const ModelParams& p, NetworkTime t, std::int64_t n, std::int64_t q);
double p_marginal_n(const ModelParams& p, NetworkTime t, std::int64_t n);
double p_marginal_q(const ModelParams& p, NetworkTime t, std::int64_t q);
double ccdf_n(const ModelParams& p, NetworkTime t, std::int64_t n);
double ccdf_q(const ModelParams& p, NetworkTime t, std::int64_t q);

double cond_n_given_q(const ModelParams& p, NetworkTime t, std::int64_t n, std::int64_t q);
double cond_q_given_n(const ModelParams& p, NetworkTime t, std::int64_t q, std::int64_t n);

double mean_n_given_q(const ModelParams& p, NetworkTime t, std::int64_t q);
// E[(n+2-alpha)(n+1-alpha) | q] at finite tau.
double second_moment_n_given_q(const ModelParams& p, std::int64_t tau, std::int64_t q);
double mean_q_given_n(const ModelParams& p, std::int64_t n);

struct MeanClusterSize {
  double exact = 0.0;
  double asymptotic = 0.0;  // (1-alpha) ln tau
};
MeanClusterSize mean_cluster_size(const ModelParams& p, std::int64_t tau);

// E_inf[(q-1)^2] = 2/|1-2 alpha|; DivergenceError at alpha = 1/2.
double indegree_fluctuation_inf(const ModelParams& p);

std::uint64_t betweenness_of(std::int64_t n, std::int64_t tau);
// Smaller root n_L of (n+1)(tau-n) = L when it is an integer.
std::optional<std::int64_t> invert_betweenness(std::uint64_t L, std::int64_t tau);

// Smallest n with (n+1)(tau-n) >= L, or tau when no cluster reaches L. Loads of
// at least L are exactly the states n_L <= n <= tau-1-n_L.
std::int64_t load_floor_index(std::uint64_t L, std::int64_t tau);

double p_load_given_q(const ModelParams& p, std::int64_t tau, std::uint64_t L, std::int64_t q);
double p_load(const ModelParams& p, std::int64_t tau, std::uint64_t L);
double ccdf_load_unconditional(const ModelParams& p, std::int64_t tau, std::uint64_t L);
// P(load >= L | q) at finite tau, summed from the conditional pmf.
double ccdf_load_given_q_finite(const ModelParams& p, std::int64_t tau, std::uint64_t L,
                                std::int64_t q);

// Infinite-network CCDF of the rescaled load Lambda given q.
double ccdf_load_given_q(const ModelParams& p, std::int64_t lambda, std::int64_t q);
// Leading-order tail alpha^2(1-alpha) q^{2/alpha} / (2 Gamma(2/alpha-1) Lambda^2).
double ccdf_load_asymptotic(const ModelParams& p, double lambda, std::int64_t q);
// Exact coefficient c_q of the Lambda^-2 tail; the closed form above uses q^{2/alpha}
// in place of Gamma(q+2/alpha)/Gamma(q), which it matches only for large q.
double ccdf_load_tail_coefficient(const ModelParams& p, std::int64_t q);
double ccdf_load_tail_coefficient_printed(const ModelParams& p, std::int64_t q);
// F_inf - (1-F_inf) alpha^2 (1-alpha) / (2 tau^2)
double ccdf_load_finite_size(const ModelParams& p, std::int64_t tau, std::int64_t lambda,
                             std::int64_t q);

// Finite tau: E[L | q]. Infinite: E[Lambda | q].
double mean_load_given_q(const ModelParams& p, NetworkTime t, std::int64_t q);

// Stationary joint P_inf(n, q) computed by the positive recurrence in n,
// stored triangularly for 0 <= q <= min(n, q_max), n <= n_max.
class JointGrid {
 public:
  JointGrid(std::int64_t n_max, std::int64_t q_max);
  std::int64_t n_max() const { return n_max_; }
  std::int64_t q_max() const { return q_max_; }
  double at(std::int64_t n, std::int64_t q) const;
  double& ref(std::int64_t n, std::int64_t q);

 private:
  std::size_t index(std::int64_t n, std::int64_t q) const;
  std::int64_t n_max_;
  std::int64_t q_max_;
  std::vector<std::size_t> row_start_;
  std::vector<double> data_;
};

JointGrid stationary_joint(double alpha, std::int64_t n_max, std::int64_t q_max = -1);

// u(n, q) = P_inf(n, q) for n = 0..n_max at a fixed q (O(n_max q) work).
std::vector<double> stationary_column(double alpha, std::int64_t q, std::int64_t n_max);

// Sweeps P_inf(n, q), q <= q_max, one row of n at a time in O(q_max) memory.
class StationaryRows {
 public:
  StationaryRows(double alpha, std::int64_t q_max);
  std::int64_t n() const { return n_; }
  double at(std::int64_t q) const;
  void advance();

 private:
  double alpha_;
  std::int64_t n_ = 0;
  std::vector<double> row_;
};

// Tail of the Poisson-binomial count behind the finite-tau ER in-degree law:
// entry j is Pr[B >= j], B = sum of Bernoulli(2/(i+2)), i = 1..tau-1.
std::vector<double> er_indegree_tail(std::int64_t tau);

}  // namespace treeload
