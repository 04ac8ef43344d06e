#include <string>

#include "treeload/errors.hpp"
#include "treeload/specialfn.hpp"

namespace treeload {

StirlingTable::StirlingTable(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw DomainError("Stirling table bound must be non-negative");
  rows_.reserve(static_cast<std::size_t>(n_max) + 1);
  rows_.push_back({mpz_class(1)});
  built_.store(1, std::memory_order_release);
}

void StirlingTable::extend_to(int n) {
  std::lock_guard lock(mutex_);
  for (int r = built_.load(std::memory_order_relaxed); r <= n; ++r) {
    const auto& prev = rows_[static_cast<std::size_t>(r - 1)];
    std::vector<mpz_class> row(static_cast<std::size_t>(r) + 1);
    row[0] = 0;
    for (int k = 1; k <= r; ++k) {
      mpz_class v = prev[static_cast<std::size_t>(k - 1)];
      if (k <= r - 1) v -= (r - 1) * prev[static_cast<std::size_t>(k)];
      row[static_cast<std::size_t>(k)] = std::move(v);
    }
    rows_.push_back(std::move(row));
    built_.store(r + 1, std::memory_order_release);
  }
}

const mpz_class& StirlingTable::at(int n, int k) {
  if (n > n_max_) throw BoundError("Stirling number requested beyond n_max = " + std::to_string(n_max_));
  if (n < 0 || k < 0 || k > n) throw DomainError("Stirling index out of range");
  if (n >= built_.load(std::memory_order_acquire)) extend_to(n);
  return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

StirlingTable& stirling_table() {
  static StirlingTable table(256);
  return table;
}

mpz_class stirling_first(int n, int k) { return stirling_table().at(n, k); }

mpz_class rising_coefficient(int n, int k) {
  mpz_class s = stirling_first(n, k);
  return ((n - k) % 2 == 0) ? s : mpz_class(-s);
}

}  // namespace treeload
