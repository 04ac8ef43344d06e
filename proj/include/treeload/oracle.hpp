#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "treeload/exact.hpp"
#include "treeload/growth.hpp"
#include "treeload/model.hpp"
#include "treeload/parallel.hpp"

namespace treeload {

inline constexpr std::int64_t kDefaultDpBound = 2000;

// Distribution of one edge born at tau_e, observed at tau; 0 <= q <= n <= tau - tau_e.
struct StateGrid {
  std::int64_t tau_e = 1;
  std::int64_t tau = 1;
  JointGrid values{0, 0};

  double at(std::int64_t n, std::int64_t q) const { return values.at(n, q); }
  double mass() const;
};

// Iterates the master equation from a fresh edge; checks mass after every step.
StateGrid dp_specific(const ModelParams& p, std::int64_t tau_e, std::int64_t tau,
                      std::int64_t bound = kDefaultDpBound);

// Uniform mixture over tau_e = 1..tau.
JointGrid dp_joint(const ModelParams& p, std::int64_t tau, std::int64_t bound = kDefaultDpBound);

// Edge-state distributions obtained by summing over every attachment history.
struct HistoryTable {
  std::int64_t tau = 0;
  bool rational = false;
  std::vector<JointGrid> per_tau_e;  // index tau_e - 1
  JointGrid mixed{0, 0};
  // Rational mode only. Dense tau x tau blocks indexed [n * tau + q].
  std::vector<std::vector<mpq_class>> exact_per_tau_e;
  std::vector<mpq_class> exact_mixed;

  mpq_class exact_at(std::int64_t n, std::int64_t q) const;
  mpq_class exact_mass() const;
};

inline constexpr std::int64_t kMaxEnumerationTau = 8;

// Rational arithmetic when p.ratio is set, long double otherwise.
HistoryTable enumerate_histories(const ModelParams& p, std::int64_t tau, Exec exec = Exec::parallel);

// Edge loads indexed by the younger endpoint (entry 0 unused), counted by
// walking every pair's path.
std::vector<std::uint64_t> bruteforce_edge_betweenness(const Tree& tree);

}  // namespace treeload
