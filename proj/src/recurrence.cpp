#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "treeload/errors.hpp"
#include "detail/er.hpp"
#include "treeload/exact.hpp"

namespace treeload {

JointGrid::JointGrid(std::int64_t n_max, std::int64_t q_max) : n_max_(n_max), q_max_(q_max) {
  if (n_max < 0 || q_max < 0) throw DomainError("JointGrid: negative bound");
  row_start_.resize(static_cast<std::size_t>(n_max) + 2);
  std::size_t off = 0;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    row_start_[static_cast<std::size_t>(n)] = off;
    off += static_cast<std::size_t>(std::min(n, q_max) + 1);
  }
  row_start_[static_cast<std::size_t>(n_max) + 1] = off;
  data_.assign(off, 0.0);
}

std::size_t JointGrid::index(std::int64_t n, std::int64_t q) const {
  return row_start_[static_cast<std::size_t>(n)] + static_cast<std::size_t>(q);
}

double JointGrid::at(std::int64_t n, std::int64_t q) const {
  if (n < 0 || q < 0 || n > n_max_ || q > std::min(n, q_max_)) return 0.0;
  return data_[index(n, q)];
}

double& JointGrid::ref(std::int64_t n, std::int64_t q) {
  if (n < 0 || q < 0 || n > n_max_ || q > std::min(n, q_max_))
    throw BoundError("JointGrid: state outside the stored triangle");
  return data_[index(n, q)];
}

JointGrid stationary_joint(double alpha, std::int64_t n_max, std::int64_t q_max) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  if (q_max < 0 || q_max > n_max) q_max = n_max;
  JointGrid g(n_max, q_max);
  g.ref(0, 0) = 1.0 / (2.0 - alpha);
  for (std::int64_t n = 0; n < n_max; ++n) {
    const double inv = 1.0 / (static_cast<double>(n) + 3.0 - alpha);
    const std::int64_t top = std::min(n + 1, q_max);
    for (std::int64_t q = 0; q <= top; ++q) {
      const double dq = static_cast<double>(q);
      const double stay = q <= n ? (static_cast<double>(n) - alpha * dq) * g.at(n, q) : 0.0;
      const double gain = q >= 1 ? (alpha * dq + 1.0 - 2.0 * alpha) * g.at(n, q - 1) : 0.0;
      g.ref(n + 1, q) = (stay + gain) * inv;
    }
  }
  return g;
}

std::vector<double> stationary_column(double alpha, std::int64_t q, std::int64_t n_max) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  if (q < 0 || n_max < 0) throw DomainError("stationary_column: negative index");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  std::vector<double> row(static_cast<std::size_t>(q) + 1, 0.0);
  row[0] = 1.0 / (2.0 - alpha);
  out[0] = q == 0 ? row[0] : 0.0;
  for (std::int64_t n = 0; n < n_max; ++n) {
    const double inv = 1.0 / (static_cast<double>(n) + 3.0 - alpha);
    for (std::int64_t k = std::min(n + 1, q); k >= 0; --k) {
      const double dk = static_cast<double>(k);
      const double stay = k <= n ? (static_cast<double>(n) - alpha * dk) * row[static_cast<std::size_t>(k)] : 0.0;
      const double gain = k >= 1 ? (alpha * dk + 1.0 - 2.0 * alpha) * row[static_cast<std::size_t>(k - 1)] : 0.0;
      row[static_cast<std::size_t>(k)] = (stay + gain) * inv;
    }
    out[static_cast<std::size_t>(n + 1)] = row[static_cast<std::size_t>(q)];
  }
  return out;
}

StationaryRows::StationaryRows(double alpha, std::int64_t q_max) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  if (q_max < 0) throw DomainError("StationaryRows: negative q_max");
  row_.assign(static_cast<std::size_t>(q_max) + 1, 0.0);
  row_[0] = 1.0 / (2.0 - alpha);
}

double StationaryRows::at(std::int64_t q) const {
  if (q < 0 || q > n_ || q >= static_cast<std::int64_t>(row_.size())) return 0.0;
  return row_[static_cast<std::size_t>(q)];
}

void StationaryRows::advance() {
  const double inv = 1.0 / (static_cast<double>(n_) + 3.0 - alpha_);
  const std::int64_t top = std::min<std::int64_t>(n_ + 1, static_cast<std::int64_t>(row_.size()) - 1);
  for (std::int64_t k = top; k >= 0; --k) {
    const double dk = static_cast<double>(k);
    const double stay = k <= n_ ? (static_cast<double>(n_) - alpha_ * dk) * row_[static_cast<std::size_t>(k)] : 0.0;
    const double gain = k >= 1 ? (alpha_ * dk + 1.0 - 2.0 * alpha_) * row_[static_cast<std::size_t>(k - 1)] : 0.0;
    row_[static_cast<std::size_t>(k)] = (stay + gain) * inv;
  }
  ++n_;
}

namespace detail {

double stationary_point(double alpha, std::int64_t n, std::int64_t q) {
  constexpr std::int64_t kCacheRows = 2048;
  if (q < 0 || q > n) return 0.0;
  if (n > kCacheRows) return stationary_column(alpha, q, n)[static_cast<std::size_t>(n)];
  struct Cache {
    double alpha = -1.0;
    std::unique_ptr<JointGrid> grid;
  };
  thread_local Cache cache;
  if (cache.alpha != alpha || !cache.grid || cache.grid->n_max() < n) {
    std::int64_t rows = std::max<std::int64_t>(64, n);
    if (cache.alpha == alpha && cache.grid) rows = std::max(rows, 2 * cache.grid->n_max());
    rows = std::min(rows, kCacheRows);
    cache.grid = std::make_unique<JointGrid>(stationary_joint(alpha, rows));
    cache.alpha = alpha;
  }
  return cache.grid->at(n, q);
}

double stationary_tail_mass(double alpha, std::int64_t tau, std::int64_t q) {
  if (q <= 0) throw DomainError("stationary_tail_mass: q must be positive");
  const bool full = tau <= 4096;
  const std::int64_t width = full ? tau : q;
  std::vector<double> row(static_cast<std::size_t>(width), 0.0);
  row[0] = 1.0 / (2.0 - alpha);
  double total = 0.0;
  for (std::int64_t n = 0;; ++n) {
    if (full) {
      for (std::int64_t k = q; k <= n; ++k) total += row[static_cast<std::size_t>(k)];
    } else if (n >= q) {
      double head = 0.0;
      for (std::int64_t k = 0; k < q; ++k) head += row[static_cast<std::size_t>(k)];
      const double dn = static_cast<double>(n);
      total += (1.0 - alpha) / ((dn + 1.0 - alpha) * (dn + 2.0 - alpha)) - head;
    }
    if (n + 1 >= tau) break;
    const double inv = 1.0 / (static_cast<double>(n) + 3.0 - alpha);
    for (std::int64_t k = std::min(n + 1, width - 1); k >= 0; --k) {
      const double dk = static_cast<double>(k);
      const double stay = k <= n ? (static_cast<double>(n) - alpha * dk) * row[static_cast<std::size_t>(k)] : 0.0;
      const double gain = k >= 1 ? (alpha * dk + 1.0 - 2.0 * alpha) * row[static_cast<std::size_t>(k - 1)] : 0.0;
      row[static_cast<std::size_t>(k)] = (stay + gain) * inv;
    }
  }
  return total;
}

}  // namespace detail

namespace {

std::vector<double> compute_er_tail(std::int64_t tau) {
  std::vector<double> pmf{1.0};
  pmf.reserve(512);
  for (std::int64_t i = 1; i <= tau - 1; ++i) {
    const double p = 2.0 / (static_cast<double>(i) + 2.0);
    const double top = pmf.back() * p;
    if (top > 1e-300) pmf.push_back(top);
    const std::size_t len = pmf.size();
    for (std::size_t j = len - 1; j >= 1; --j) {
      if (j == len - 1 && top > 1e-300) continue;
      pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
    }
    pmf[0] *= (1.0 - p);
  }
  std::vector<double> tail(pmf.size(), 0.0);
  double acc = 0.0;
  for (std::size_t j = pmf.size(); j-- > 0;) {
    acc += pmf[j];
    tail[j] = acc;
  }
  return tail;
}

}  // namespace

std::vector<double> er_indegree_tail(std::int64_t tau) {
  if (tau < 1) throw DomainError("er_indegree_tail: tau must be positive");
  static std::mutex mutex;
  static std::map<std::int64_t, std::shared_ptr<const std::vector<double>>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(tau); it != cache.end()) return *it->second;
  }
  auto tail = std::make_shared<const std::vector<double>>(compute_er_tail(tau));
  std::lock_guard lock(mutex);
  if (cache.size() >= 8) cache.erase(cache.begin());
  cache.emplace(tau, tail);
  return *tail;
}

}  // namespace treeload
