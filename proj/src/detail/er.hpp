#pragma once

#include <cstdint>

#include "treeload/model.hpp"

namespace treeload::detail {

// alpha = 0 branches. Finite-tau arguments are assumed inside the support.
double er_p_joint(NetworkTime t, std::int64_t n, std::int64_t q);
double er_p_marginal_q(NetworkTime t, std::int64_t q);
double er_ccdf_q(NetworkTime t, std::int64_t q);

// Conditional moments at finite tau from the stationary column at alpha = 0.
struct ColumnMoments {
  double m0 = 0.0;  // sum_n u(n,q)
  double m1 = 0.0;  // sum_n n u(n,q)
  double m2 = 0.0;  // sum_n n^2 u(n,q)
};
ColumnMoments column_moments(double alpha, std::int64_t tau, std::int64_t q);

// sum_{n < tau} sum_{k >= q} P_inf(n, k): a full-width sweep for tau <= 4096,
// otherwise the row marginal minus the head of the row.
double stationary_tail_mass(double alpha, std::int64_t tau, std::int64_t q);

// P_inf(n, q) from the positive recurrence in n; grids up to n = 2048 are
// cached per thread.
double stationary_point(double alpha, std::int64_t n, std::int64_t q);

double checked_probability(double raw, const char* what);

}  // namespace treeload::detail
