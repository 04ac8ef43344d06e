#include "treeload/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treeload/errors.hpp"
#include "treeload/exact.hpp"
#include "treeload/format.hpp"

namespace treeload {

std::vector<EdgeRecord> edge_records(const Tree& tree, bool with_q_min) {
  tree.validate();
  const std::size_t order = tree.order();
  if (order < 2) return {};
  const auto tau = static_cast<std::uint64_t>(order - 1);
  std::vector<std::uint32_t> size(order, 1);
  std::vector<std::uint32_t> indeg(order, 0);
  for (std::size_t i = order - 1; i >= 1; --i) {
    size[tree.parent[i]] += size[i];
    ++indeg[tree.parent[i]];
  }
  std::vector<EdgeRecord> out(order - 1);
  for (std::size_t i = 1; i < order; ++i) {
    EdgeRecord& r = out[i - 1];
    r.node = static_cast<std::uint32_t>(i);
    r.tau_e = r.node;
    r.q = indeg[i];
    r.n = size[i] - 1;
    r.L = (static_cast<std::uint64_t>(r.n) + 1) * (tau - r.n);
    if (with_q_min) r.q_min = std::min(indeg[i], indeg[tree.parent[i]]);
  }
  return out;
}

void write_records_header(std::ostream& os, bool with_q_min) {
  os << (with_q_min ? "rep,node,tau_e,q,n,L,q_min\n" : "rep,node,tau_e,q,n,L\n");
}

void write_records(std::ostream& os, std::uint64_t rep, std::span<const EdgeRecord> records, bool with_q_min) {
  std::string buf;
  buf.reserve(1 << 16);
  const std::string prefix = std::to_string(rep) + ',';
  for (const auto& r : records) {
    buf += prefix;
    buf += std::to_string(r.node);
    buf += ',';
    buf += std::to_string(r.tau_e);
    buf += ',';
    buf += std::to_string(r.q);
    buf += ',';
    buf += std::to_string(r.n);
    buf += ',';
    buf += std::to_string(r.L);
    if (with_q_min) {
      buf += ',';
      buf += std::to_string(r.q_min);
    }
    buf += '\n';
    if (buf.size() > (1 << 16) - 128) {
      os << buf;
      buf.clear();
    }
  }
  os << buf;
}

namespace {

constexpr std::size_t dense_index(std::uint32_t n, std::uint32_t q) {
  return static_cast<std::size_t>(n) * (n + 1) / 2 + q;
}

template <class T>
void grow_to(std::vector<T>& v, std::size_t size) {
  if (v.size() < size) v.resize(size, T(0));
}

template <class T>
void add_into(std::vector<T>& dst, const std::vector<T>& src) {
  grow_to(dst, src.size());
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

std::uint64_t half_support(std::int64_t tau) { return static_cast<std::uint64_t>((tau - 1) / 2) + 1; }

// Per-realization tail counts of load restricted to the clusters in hist.
template <class F>
void load_tails(const std::vector<std::uint64_t>& hist, std::int64_t tau, F&& sink) {
  std::uint64_t c = 0;
  for (std::int64_t x = (tau - 1) / 2; x >= 0; --x) {
    c += hist[static_cast<std::size_t>(x)];
    if (tau - 1 - x != x) c += hist[static_cast<std::size_t>(tau - 1 - x)];
    sink(static_cast<std::size_t>(x), c);
  }
}

}  // namespace

EnsembleStats::EnsembleStats(double a, std::int64_t t, const std::vector<std::int64_t>& load_track_q)
    : alpha(a), tau(t) {
  if (t < 1) throw DomainError("EnsembleStats: tau must be positive");
  const auto rows = std::min<std::uint64_t>(kDenseRows, static_cast<std::uint64_t>(t));
  joint_dense.assign(static_cast<std::size_t>(rows * (rows + 1) / 2), 0);
  count_n.assign(static_cast<std::size_t>(t), 0);
  sum_q_by_n.assign(static_cast<std::size_t>(t), 0);
  sum_q2_by_n.assign(static_cast<std::size_t>(t), 0);
  tail_n_sum.assign(static_cast<std::size_t>(t), 0);
  tail_n_sum2.assign(static_cast<std::size_t>(t), 0);
  std::vector<std::int64_t> qs = load_track_q;
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  for (std::int64_t q : qs) {
    LoadTrack tr;
    tr.q = q;
    const auto h = static_cast<std::size_t>(half_support(t));
    tr.sum_c.assign(h, 0);
    tr.sum_c2.assign(h, 0);
    tr.sum_cm.assign(h, 0);
    load_tracks.push_back(std::move(tr));
  }
}

void EnsembleStats::add(std::span<const EdgeRecord> records) {
  if (static_cast<std::int64_t>(records.size()) != tau)
    throw MixedParameterError("EnsembleStats::add: realization has " + std::to_string(records.size()) +
                              " edges, expected " + std::to_string(tau));
  const auto T = static_cast<std::size_t>(tau);
  std::vector<std::uint64_t> hist_n(T, 0);
  std::vector<std::uint64_t> hist_q;
  for (const auto& r : records) {
    if (r.q > r.n || r.n >= T) throw MalformedTreeError("EnsembleStats::add: record outside the state space");
    if (r.n < kDenseRows)
      ++joint_dense[dense_index(r.n, r.q)];
    else
      ++joint_sparse[{r.n, r.q}];
    ++hist_n[r.n];
    grow_to(hist_q, r.q + 1);
    ++hist_q[r.q];
    grow_to(sum_n_by_q, r.q + 1);
    grow_to(sum_n2_by_q, r.q + 1);
    grow_to(sum_L_by_q, r.q + 1);
    grow_to(sum_L2_by_q, r.q + 1);
    sum_n_by_q[r.q] += r.n;
    sum_n2_by_q[r.q] += static_cast<u128>(r.n) * r.n;
    sum_L_by_q[r.q] += r.L;
    sum_L2_by_q[r.q] += static_cast<u128>(r.L) * r.L;
    sum_q_by_n[r.n] += r.q;
    sum_q2_by_n[r.n] += static_cast<u128>(r.q) * r.q;
  }
  add_into(count_n, hist_n);
  add_into(count_q, hist_q);

  std::uint64_t c = 0;
  for (std::size_t x = T; x-- > 0;) {
    c += hist_n[x];
    tail_n_sum[x] += c;
    tail_n_sum2[x] += static_cast<u128>(c) * c;
  }
  grow_to(tail_q_sum, hist_q.size());
  grow_to(tail_q_sum2, hist_q.size());
  c = 0;
  for (std::size_t x = hist_q.size(); x-- > 0;) {
    c += hist_q[x];
    tail_q_sum[x] += c;
    tail_q_sum2[x] += static_cast<u128>(c) * c;
  }

  std::vector<std::uint64_t> hist;
  for (auto& tr : load_tracks) {
    std::uint64_t m = 0;
    const std::vector<std::uint64_t>* h = &hist_n;
    if (tr.q >= 0) {
      hist.assign(T, 0);
      for (const auto& r : records)
        if (r.q == tr.q) ++hist[r.n];
      h = &hist;
      m = static_cast<std::size_t>(tr.q) < hist_q.size() ? hist_q[static_cast<std::size_t>(tr.q)] : 0;
    } else {
      m = records.size();
    }
    tr.sum_m += m;
    tr.sum_m2 += static_cast<u128>(m) * m;
    load_tails(*h, tau, [&](std::size_t x, std::uint64_t cx) {
      tr.sum_c[x] += cx;
      tr.sum_c2[x] += static_cast<u128>(cx) * cx;
      tr.sum_cm[x] += static_cast<u128>(cx) * m;
    });
  }
  ++realizations;
}

void EnsembleStats::merge(const EnsembleStats& o) {
  if (o.alpha != alpha || o.tau != tau) throw MixedParameterError("EnsembleStats::merge: alpha or tau differ");
  if (o.load_tracks.size() != load_tracks.size()) throw MixedParameterError("EnsembleStats::merge: load tracks differ");
  for (std::size_t i = 0; i < load_tracks.size(); ++i)
    if (o.load_tracks[i].q != load_tracks[i].q) throw MixedParameterError("EnsembleStats::merge: load tracks differ");
  realizations += o.realizations;
  add_into(joint_dense, o.joint_dense);
  for (const auto& [key, v] : o.joint_sparse) joint_sparse[key] += v;
  add_into(count_n, o.count_n);
  add_into(count_q, o.count_q);
  add_into(sum_n_by_q, o.sum_n_by_q);
  add_into(sum_n2_by_q, o.sum_n2_by_q);
  add_into(sum_L_by_q, o.sum_L_by_q);
  add_into(sum_L2_by_q, o.sum_L2_by_q);
  add_into(sum_q_by_n, o.sum_q_by_n);
  add_into(sum_q2_by_n, o.sum_q2_by_n);
  add_into(tail_n_sum, o.tail_n_sum);
  add_into(tail_n_sum2, o.tail_n_sum2);
  add_into(tail_q_sum, o.tail_q_sum);
  add_into(tail_q_sum2, o.tail_q_sum2);
  for (std::size_t i = 0; i < load_tracks.size(); ++i) {
    auto& a = load_tracks[i];
    const auto& b = o.load_tracks[i];
    a.sum_m += b.sum_m;
    a.sum_m2 += b.sum_m2;
    add_into(a.sum_c, b.sum_c);
    add_into(a.sum_c2, b.sum_c2);
    add_into(a.sum_cm, b.sum_cm);
  }
}

std::uint64_t EnsembleStats::joint(std::uint32_t n, std::uint32_t q) const {
  if (q > n) return 0;
  if (n < kDenseRows) {
    const std::size_t i = dense_index(n, q);
    return i < joint_dense.size() ? joint_dense[i] : 0;
  }
  const auto it = joint_sparse.find({n, q});
  return it == joint_sparse.end() ? 0 : it->second;
}

std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> EnsembleStats::joint_cells() const {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> out;
  const auto rows = std::min<std::uint64_t>(kDenseRows, static_cast<std::uint64_t>(std::max<std::int64_t>(tau, 0)));
  for (std::uint32_t n = 0; n < rows; ++n)
    for (std::uint32_t q = 0; q <= n; ++q)
      if (const auto c = joint_dense[dense_index(n, q)]) out.emplace_back(n, q, c);
  for (const auto& [key, c] : joint_sparse)
    if (c) out.emplace_back(key.first, key.second, c);
  return out;
}

std::uint64_t EnsembleStats::total_edges() const {
  std::uint64_t s = 0;
  for (auto c : count_n) s += c;
  return s;
}

const EnsembleStats::LoadTrack* EnsembleStats::track(std::int64_t q) const {
  for (const auto& tr : load_tracks)
    if (tr.q == q) return &tr;
  return nullptr;
}

namespace {

nlohmann::json u128_array(const std::vector<u128>& v) {
  auto j = nlohmann::json::array();
  for (auto x : v) j.push_back(format_u128(x));
  return j;
}

std::vector<u128> u128_vector(const nlohmann::json& j) {
  std::vector<u128> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(parse_u128(x.get<std::string>()));
  return v;
}

}  // namespace

nlohmann::json EnsembleStats::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["tau"] = tau;
  j["realizations"] = realizations;
  auto cells = nlohmann::json::array();
  for (const auto& [n, q, c] : joint_cells()) cells.push_back({n, q, c});
  j["joint"] = std::move(cells);
  j["count_n"] = count_n;
  j["count_q"] = count_q;
  j["sum_n_by_q"] = sum_n_by_q;
  j["sum_n2_by_q"] = u128_array(sum_n2_by_q);
  j["sum_L_by_q"] = sum_L_by_q;
  j["sum_L2_by_q"] = u128_array(sum_L2_by_q);
  j["sum_q_by_n"] = sum_q_by_n;
  j["sum_q2_by_n"] = u128_array(sum_q2_by_n);
  j["tail_n_sum"] = tail_n_sum;
  j["tail_n_sum2"] = u128_array(tail_n_sum2);
  j["tail_q_sum"] = tail_q_sum;
  j["tail_q_sum2"] = u128_array(tail_q_sum2);
  auto tracks = nlohmann::json::array();
  for (const auto& tr : load_tracks) {
    tracks.push_back({{"q", tr.q},
                      {"sum_m", tr.sum_m},
                      {"sum_m2", format_u128(tr.sum_m2)},
                      {"sum_c", tr.sum_c},
                      {"sum_c2", u128_array(tr.sum_c2)},
                      {"sum_cm", u128_array(tr.sum_cm)}});
  }
  j["load_tracks"] = std::move(tracks);
  return j;
}

EnsembleStats EnsembleStats::from_json(const nlohmann::json& j) {
  std::vector<std::int64_t> qs;
  for (const auto& tr : j.at("load_tracks")) qs.push_back(tr.at("q").get<std::int64_t>());
  EnsembleStats s(j.at("alpha").get<double>(), j.at("tau").get<std::int64_t>(), qs);
  s.realizations = j.at("realizations").get<std::uint64_t>();
  for (const auto& cell : j.at("joint")) {
    const auto n = cell.at(0).get<std::uint32_t>();
    const auto q = cell.at(1).get<std::uint32_t>();
    const auto c = cell.at(2).get<std::uint64_t>();
    if (n < kDenseRows)
      s.joint_dense.at(dense_index(n, q)) = c;
    else
      s.joint_sparse[{n, q}] = c;
  }
  s.count_n = j.at("count_n").get<std::vector<std::uint64_t>>();
  s.count_q = j.at("count_q").get<std::vector<std::uint64_t>>();
  s.sum_n_by_q = j.at("sum_n_by_q").get<std::vector<std::uint64_t>>();
  s.sum_n2_by_q = u128_vector(j.at("sum_n2_by_q"));
  s.sum_L_by_q = j.at("sum_L_by_q").get<std::vector<std::uint64_t>>();
  s.sum_L2_by_q = u128_vector(j.at("sum_L2_by_q"));
  s.sum_q_by_n = j.at("sum_q_by_n").get<std::vector<std::uint64_t>>();
  s.sum_q2_by_n = u128_vector(j.at("sum_q2_by_n"));
  s.tail_n_sum = j.at("tail_n_sum").get<std::vector<std::uint64_t>>();
  s.tail_n_sum2 = u128_vector(j.at("tail_n_sum2"));
  s.tail_q_sum = j.at("tail_q_sum").get<std::vector<std::uint64_t>>();
  s.tail_q_sum2 = u128_vector(j.at("tail_q_sum2"));
  const auto& tracks = j.at("load_tracks");
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    auto& tr = s.load_tracks[i];
    tr.sum_m = tracks[i].at("sum_m").get<std::uint64_t>();
    tr.sum_m2 = parse_u128(tracks[i].at("sum_m2").get<std::string>());
    tr.sum_c = tracks[i].at("sum_c").get<std::vector<std::uint64_t>>();
    tr.sum_c2 = u128_vector(tracks[i].at("sum_c2"));
    tr.sum_cm = u128_vector(tracks[i].at("sum_cm"));
  }
  return s;
}

namespace {

using ld = long double;

double binomial_se(double f, ld m) { return m > 0 ? static_cast<double>(std::sqrt(std::max<ld>(f * (1 - f), 0) / m)) : 0.0; }

// Standard error of the mean per-realization fraction c_r / m with m fixed.
double fixed_ratio_se(std::uint64_t sum_c, u128 sum_c2, std::uint64_t reps, ld m) {
  if (reps < 2) return 0.0;
  const ld r = static_cast<ld>(reps);
  const ld s1 = static_cast<ld>(sum_c);
  const ld var = (static_cast<ld>(sum_c2) - s1 * s1 / r) / (r - 1);
  return static_cast<double>(std::sqrt(std::max<ld>(var, 0) / r) / m);
}

// Ratio estimator sum c_r / sum m_r with its linearized standard error.
double ratio_se(std::uint64_t sum_c, u128 sum_c2, u128 sum_cm, std::uint64_t sum_m, u128 sum_m2,
                std::uint64_t reps) {
  if (reps < 2 || sum_m == 0) return 0.0;
  const ld r = static_cast<ld>(reps);
  const ld f = static_cast<ld>(sum_c) / static_cast<ld>(sum_m);
  const ld d2 = static_cast<ld>(sum_c2) - 2 * f * static_cast<ld>(sum_cm) + f * f * static_cast<ld>(sum_m2);
  const ld m = static_cast<ld>(sum_m);
  return static_cast<double>(std::sqrt(std::max<ld>(d2, 0) * r / ((r - 1) * m * m)));
}

std::vector<CcdfPoint> tail_points(const std::vector<std::uint64_t>& counts, const std::vector<std::uint64_t>& sum_c,
                                   const std::vector<u128>& sum_c2, std::uint64_t reps, std::int64_t tau) {
  std::size_t top = counts.size();
  while (top > 0 && counts[top - 1] == 0) --top;
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  std::vector<CcdfPoint> out(top);
  std::uint64_t tail = 0;
  for (std::size_t x = top; x-- > 0;) {
    tail += counts[x];
    CcdfPoint& pt = out[x];
    pt.support = x;
    pt.tail_count = tail;
    pt.sample_count = total;
    pt.ccdf = static_cast<double>(static_cast<ld>(tail) / static_cast<ld>(total));
    const double se_b = x < sum_c.size() ? fixed_ratio_se(sum_c[x], sum_c2[x], reps, static_cast<ld>(tau)) : 0.0;
    pt.std_error = std::max(se_b, binomial_se(pt.ccdf, static_cast<ld>(total)));
  }
  return out;
}

}  // namespace

std::vector<CcdfPoint> empirical_ccdf(const EnsembleStats& s, CcdfKind kind, std::int64_t q) {
  if (s.realizations == 0) throw EmptyConditionError("empirical_ccdf: no realizations");
  switch (kind) {
    case CcdfKind::n:
      return tail_points(s.count_n, s.tail_n_sum, s.tail_n_sum2, s.realizations, s.tau);
    case CcdfKind::q:
      return tail_points(s.count_q, s.tail_q_sum, s.tail_q_sum2, s.realizations, s.tau);
    case CcdfKind::load_given_q:
    case CcdfKind::load:
      break;
  }
  const bool conditional = kind == CcdfKind::load_given_q;
  if (conditional && q < 0) throw DomainError("empirical_ccdf: load_given_q needs q >= 0");
  const std::int64_t tau = s.tau;
  const auto T = static_cast<std::size_t>(tau);
  std::vector<std::uint64_t> hist(T, 0);
  std::uint64_t m = 0;
  if (conditional) {
    for (const auto& [n, qq, c] : s.joint_cells())
      if (qq == q) hist[n] += c;
  } else {
    hist = s.count_n;
  }
  for (auto c : hist) m += c;
  if (m == 0) throw EmptyConditionError("empirical_ccdf: no edge with in-degree " + std::to_string(q));
  std::vector<std::uint64_t> tail(static_cast<std::size_t>(half_support(tau)), 0);
  load_tails(hist, tau, [&](std::size_t x, std::uint64_t c) { tail[x] = c; });
  const auto* tr = s.track(conditional ? q : -1);

  auto point = [&](std::uint64_t support, std::size_t x) {
    CcdfPoint pt;
    pt.support = support;
    pt.tail_count = tail[x];
    pt.sample_count = m;
    pt.ccdf = static_cast<double>(static_cast<ld>(tail[x]) / static_cast<ld>(m));
    double se = 0.0;
    if (tr) se = ratio_se(tr->sum_c[x], tr->sum_c2[x], tr->sum_cm[x], tr->sum_m, tr->sum_m2, s.realizations);
    pt.std_error = std::max(se, binomial_se(pt.ccdf, static_cast<ld>(m)));
    return pt;
  };

  std::vector<CcdfPoint> out;
  if (conditional) {
    for (std::size_t x = 0; x < tail.size() && tail[x] > 0; ++x) out.push_back(point(x + 1, x));
  } else {
    for (std::size_t x = 0; x < tail.size() && tail[x] > 0; ++x)
      out.push_back(point(betweenness_of(static_cast<std::int64_t>(x), tau), x));
  }
  return out;
}

namespace {

MeanPoint mean_point(std::int64_t cond, std::uint64_t count, ld sum, ld sum2, ld scale) {
  MeanPoint p;
  p.condition = cond;
  p.count = count;
  const ld c = static_cast<ld>(count);
  const ld mean = sum / c;
  p.mean = static_cast<double>(mean / scale);
  if (count > 1) {
    const ld var = std::max<ld>((sum2 - c * mean * mean) / (c - 1), 0);
    p.std_error = static_cast<double>(std::sqrt(var / c) / scale);
  }
  return p;
}

}  // namespace

ConditionalMeans conditional_means(const EnsembleStats& s) {
  ConditionalMeans out;
  for (std::size_t q = 0; q < s.count_q.size(); ++q) {
    const auto c = s.count_q[q];
    if (c == 0) continue;
    const auto cond = static_cast<std::int64_t>(q);
    out.n_given_q.push_back(mean_point(cond, c, static_cast<ld>(s.sum_n_by_q[q]), static_cast<ld>(s.sum_n2_by_q[q]), 1));
    out.lambda_given_q.push_back(mean_point(cond, c, static_cast<ld>(s.sum_L_by_q[q]),
                                            static_cast<ld>(s.sum_L2_by_q[q]), static_cast<ld>(s.tau) + 1));
  }
  for (std::size_t n = 0; n < s.count_n.size(); ++n) {
    const auto c = s.count_n[n];
    if (c == 0) continue;
    out.q_given_n.push_back(mean_point(static_cast<std::int64_t>(n), c, static_cast<ld>(s.sum_q_by_n[n]),
                                       static_cast<ld>(s.sum_q2_by_n[n]), 1));
  }
  return out;
}

}  // namespace treeload
