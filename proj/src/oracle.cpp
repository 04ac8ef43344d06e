#include "treeload/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treeload/errors.hpp"

namespace treeload {

namespace {

void check_bound(std::int64_t tau, std::int64_t bound) {
  if (tau > bound)
    throw BoundError("DP bound exceeded: tau = " + std::to_string(tau) + " > " + std::to_string(bound));
}

double grid_mass(const JointGrid& g) {
  double s = 0.0, c = 0.0;
  for (std::int64_t n = 0; n <= g.n_max(); ++n) {
    for (std::int64_t q = 0; q <= std::min(n, g.q_max()); ++q) {
      const double x = g.at(n, q);
      const double t = s + x;
      c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
      s = t;
    }
  }
  return s + c;
}

// One arrival on top of t edges: src holds states with n <= m - 1, dst gets n <= m.
void step(const JointGrid& src, JointGrid& dst, double alpha, std::int64_t t, std::int64_t m) {
  const double denom = static_cast<double>(t) + 1.0 - alpha;
  for (std::int64_t n = 0; n <= m; ++n) {
    for (std::int64_t q = 0; q <= n; ++q) {
      double v = 0.0;
      if (n < m) v += src.at(n, q) * (static_cast<double>(t - n) / denom);
      if (n >= 1) {
        const double dq = static_cast<double>(q);
        if (q <= n - 1) v += src.at(n - 1, q) * ((static_cast<double>(n - 1) - alpha * dq) / denom);
        if (q >= 1) v += src.at(n - 1, q - 1) * ((alpha * (dq - 1.0) + 1.0 - alpha) / denom);
      }
      dst.ref(n, q) = v;
    }
  }
}

}  // namespace

double StateGrid::mass() const { return grid_mass(values); }

StateGrid dp_specific(const ModelParams& p, std::int64_t tau_e, std::int64_t tau, std::int64_t bound) {
  p.validate();
  if (tau_e < 1 || tau_e > tau) throw DomainError("dp_specific: need 1 <= tau_e <= tau");
  check_bound(tau, bound);
  JointGrid cur(0, 0);
  cur.ref(0, 0) = 1.0;
  for (std::int64_t t = tau_e; t < tau; ++t) {
    const std::int64_t m = t + 1 - tau_e;
    JointGrid next(m, m);
    step(cur, next, p.alpha, t, m);
    const double mass = grid_mass(next);
    if (std::abs(mass - 1.0) > 1e-13)
      throw NumericIntegrityError("dp_specific: mass drifted to " + std::to_string(mass));
    cur = std::move(next);
  }
  return StateGrid{tau_e, tau, std::move(cur)};
}

JointGrid dp_joint(const ModelParams& p, std::int64_t tau, std::int64_t bound) {
  p.validate();
  if (tau < 1) throw DomainError("dp_joint: tau must be at least 1");
  check_bound(tau, bound);
  // unnormalized mixture: sum over the edges born so far
  JointGrid cur(0, 0);
  cur.ref(0, 0) = 1.0;
  for (std::int64_t t = 1; t < tau; ++t) {
    JointGrid next(t, t);
    step(cur, next, p.alpha, t, t);
    next.ref(0, 0) += 1.0;
    const double mass = grid_mass(next);
    if (std::abs(mass - static_cast<double>(t + 1)) > 1e-13 * static_cast<double>(t + 1))
      throw NumericIntegrityError("dp_joint: mass drifted to " + std::to_string(mass));
    cur = std::move(next);
  }
  const double inv = 1.0 / static_cast<double>(tau);
  for (std::int64_t n = 0; n < tau; ++n)
    for (std::int64_t q = 0; q <= n; ++q) cur.ref(n, q) *= inv;
  return cur;
}

std::vector<std::uint64_t> bruteforce_edge_betweenness(const Tree& tree) {
  tree.validate();
  const std::size_t order = tree.order();
  if (order > 2000) throw BoundError("bruteforce_edge_betweenness: more than 2000 nodes");
  std::vector<std::uint32_t> depth(order, 0);
  for (std::size_t i = 1; i < order; ++i) depth[i] = depth[tree.parent[i]] + 1;
  std::vector<std::uint64_t> load(order, 0);
  for (std::size_t u = 0; u < order; ++u) {
    for (std::size_t v = u + 1; v < order; ++v) {
      std::size_t a = u, b = v;
      while (a != b) {
        // the deeper endpoint steps up across the edge owned by it
        if (depth[a] >= depth[b]) {
          ++load[a];
          a = tree.parent[a];
        } else {
          ++load[b];
          b = tree.parent[b];
        }
      }
    }
  }
  return load;
}

}  // namespace treeload
