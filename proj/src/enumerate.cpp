#include <algorithm>
#include <string>
#include <vector>

#include "treeload/errors.hpp"
#include "treeload/oracle.hpp"

namespace treeload {

namespace {

// Attachment weights for the arrival of node t among nodes 0..t-1.
struct RationalWeights {
  long r, s;  // alpha = r / s
  mpq_class weight(std::uint32_t indeg, std::uint32_t t) const {
    const long total = s * static_cast<long>(t) - r;
    if (total == 0) return mpq_class(1);  // first arrival with a = 0
    mpq_class w(s - r + r * static_cast<long>(indeg), total);
    w.canonicalize();
    return w;
  }
};

struct FloatWeights {
  long double alpha;
  long double weight(std::uint32_t indeg, std::uint32_t t) const {
    const long double total = static_cast<long double>(t) - alpha;
    if (total == 0) return 1.0L;
    return (1.0L - alpha + alpha * static_cast<long double>(indeg)) / total;
  }
};

struct Prefix {
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> indeg;
};

template <class W>
bool positive(const W& w) {
  return w > 0;
}

template <class W, class Weights>
class Enumerator {
 public:
  Enumerator(const Weights& weights, std::uint32_t tau) : weights_(weights), tau_(tau) {}

  // tally[(tau_e - 1) * tau^2 + n * tau + q]
  std::vector<W> run(Prefix start, std::uint32_t next_node, const W& prob) {
    tally_.assign(static_cast<std::size_t>(tau_) * tau_ * tau_, W(0));
    parent_ = std::move(start.parent);
    indeg_ = std::move(start.indeg);
    size_.assign(tau_ + 1, 0);
    descend(next_node, prob);
    return std::move(tally_);
  }

 private:
  void descend(std::uint32_t t, const W& prob) {
    if (t > tau_) {
      leaf(prob);
      return;
    }
    for (std::uint32_t v = 0; v < t; ++v) {
      const W w = weights_.weight(indeg_[v], t);
      if (!positive(w)) continue;
      parent_[t] = v;
      ++indeg_[v];
      descend(t + 1, W(prob * w));
      --indeg_[v];
    }
  }

  void leaf(const W& prob) {
    std::fill(size_.begin(), size_.end(), 1);
    for (std::uint32_t i = tau_; i >= 1; --i) size_[parent_[i]] += size_[i];
    const std::size_t tt = static_cast<std::size_t>(tau_) * tau_;
    for (std::uint32_t i = 1; i <= tau_; ++i) {
      const std::size_t n = size_[i] - 1;
      tally_[(i - 1) * tt + n * tau_ + indeg_[i]] += prob;
    }
  }

  Weights weights_;
  std::uint32_t tau_;
  std::vector<std::uint32_t> parent_, indeg_, size_;
  std::vector<W> tally_;
};

template <class W, class Weights>
void prefixes(const Weights& weights, std::uint32_t depth, std::uint32_t t, Prefix& cur, const W& prob,
              std::vector<std::pair<Prefix, W>>& out) {
  if (t > depth) {
    out.emplace_back(cur, prob);
    return;
  }
  for (std::uint32_t v = 0; v < t; ++v) {
    const W w = weights.weight(cur.indeg[v], t);
    if (!positive(w)) continue;
    cur.parent[t] = v;
    ++cur.indeg[v];
    prefixes(weights, depth, t + 1, cur, W(prob * w), out);
    --cur.indeg[v];
  }
}

template <class W, class Weights>
std::vector<W> enumerate_all(const Weights& weights, std::uint32_t tau, Exec exec) {
  const std::uint32_t depth = std::min<std::uint32_t>(tau, 4);
  Prefix root{std::vector<std::uint32_t>(tau + 1, 0), std::vector<std::uint32_t>(tau + 1, 0)};
  std::vector<std::pair<Prefix, W>> tasks;
  prefixes<W>(weights, depth, 1, root, W(1), tasks);
  auto partial = map_indices<std::vector<W>>(
      tasks.size(),
      [&](std::size_t i) {
        Enumerator<W, Weights> e(weights, tau);
        return e.run(tasks[i].first, depth + 1, tasks[i].second);
      },
      exec);
  std::vector<W> total(partial.front().size(), W(0));
  for (const auto& part : partial)
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += part[k];
  return total;
}

}  // namespace

mpq_class HistoryTable::exact_at(std::int64_t n, std::int64_t q) const {
  if (!rational) throw DomainError("HistoryTable: exact values exist only in rational mode");
  if (n < 0 || q < 0 || n >= tau || q >= tau) return 0;
  return exact_mixed[static_cast<std::size_t>(n * tau + q)];
}

mpq_class HistoryTable::exact_mass() const {
  mpq_class s = 0;
  for (const auto& x : exact_mixed) s += x;
  return s;
}

HistoryTable enumerate_histories(const ModelParams& p, std::int64_t tau, Exec exec) {
  p.validate();
  if (tau < 1) throw DomainError("enumerate_histories: tau must be at least 1");
  if (tau > kMaxEnumerationTau)
    throw BoundError("enumerate_histories: tau = " + std::to_string(tau) + " exceeds " +
                     std::to_string(kMaxEnumerationTau));
  const auto t = static_cast<std::uint32_t>(tau);
  const std::size_t tt = static_cast<std::size_t>(tau * tau);

  HistoryTable out;
  out.tau = tau;
  out.rational = p.ratio.has_value();
  out.mixed = JointGrid(tau - 1, tau - 1);
  std::vector<double> values(tt * t, 0.0);
  if (out.rational) {
    const auto exact = enumerate_all<mpq_class>(RationalWeights{p.ratio->num, p.ratio->den}, t, exec);
    out.exact_mixed.assign(tt, mpq_class(0));
    for (std::int64_t e = 0; e < tau; ++e) {
      std::vector<mpq_class> block(exact.begin() + e * tt, exact.begin() + (e + 1) * tt);
      for (std::size_t k = 0; k < tt; ++k) out.exact_mixed[k] += block[k];
      out.exact_per_tau_e.push_back(std::move(block));
    }
    for (auto& x : out.exact_mixed) x /= tau;
    for (std::size_t k = 0; k < exact.size(); ++k) values[k] = exact[k].get_d();
  } else {
    const auto approx = enumerate_all<long double>(FloatWeights{static_cast<long double>(p.alpha)}, t, exec);
    for (std::size_t k = 0; k < approx.size(); ++k) values[k] = static_cast<double>(approx[k]);
  }

  for (std::int64_t e = 0; e < tau; ++e) {
    const std::int64_t span = tau - 1 - e;
    JointGrid g(span, span);
    for (std::int64_t n = 0; n <= span; ++n)
      for (std::int64_t q = 0; q <= n; ++q) g.ref(n, q) = values[e * tt + n * tau + q];
    out.per_tau_e.push_back(std::move(g));
  }
  for (std::int64_t n = 0; n < tau; ++n) {
    for (std::int64_t q = 0; q <= n; ++q) {
      if (out.rational) {
        out.mixed.ref(n, q) = out.exact_mixed[n * tau + q].get_d();
      } else {
        long double s = 0;
        for (std::int64_t e = 0; e < tau; ++e) s += values[e * tt + n * tau + q];
        out.mixed.ref(n, q) = static_cast<double>(s / tau);
      }
    }
  }
  return out;
}

}  // namespace treeload
