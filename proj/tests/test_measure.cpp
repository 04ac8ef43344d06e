#include <doctest.h>

#include <cmath>
#include <queue>
#include <sstream>

#include "treeload/ensemble.hpp"
#include "treeload/errors.hpp"
#include "treeload/exact.hpp"
#include "treeload/growth.hpp"
#include "treeload/measure.hpp"

using namespace treeload;

namespace {

ModelParams A(double a) {
  ModelParams p;
  p.alpha = a;
  return p;
}

const Tree kPath{{0, 0, 1, 2}};
const Tree kStar{{0, 0, 0, 0}};

EnsembleConfig config(double a, std::uint64_t size, std::uint64_t reps, std::uint64_t seed) {
  EnsembleConfig c;
  c.params = A(a);
  c.size = size;
  c.reps = reps;
  c.seed = seed;
  return c;
}

std::uint64_t all_pairs_distance(const Tree& t) {
  const std::size_t N = t.order();
  std::vector<std::vector<std::uint32_t>> adj(N);
  for (std::size_t i = 1; i < N; ++i) {
    adj[i].push_back(t.parent[i]);
    adj[t.parent[i]].push_back(static_cast<std::uint32_t>(i));
  }
  std::uint64_t total = 0;
  std::vector<std::int64_t> dist(N);
  for (std::size_t s = 0; s < N; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<std::uint32_t> bfs;
    dist[s] = 0;
    bfs.push(static_cast<std::uint32_t>(s));
    while (!bfs.empty()) {
      const auto v = bfs.front();
      bfs.pop();
      for (auto w : adj[v])
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          bfs.push(w);
        }
    }
    for (std::size_t u = s + 1; u < N; ++u) total += static_cast<std::uint64_t>(dist[u]);
  }
  return total;
}

}  // namespace

TEST_CASE("edge records") {
  const auto path = edge_records(kPath);
  REQUIRE(path.size() == 3);
  CHECK(path[0].node == 1);
  CHECK(path[0].tau_e == 1);
  CHECK((path[0].q == 1 && path[0].n == 2 && path[0].L == 3));
  CHECK((path[1].q == 1 && path[1].n == 1 && path[1].L == 4));
  CHECK((path[2].q == 0 && path[2].n == 0 && path[2].L == 3));

  for (const auto& r : edge_records(kStar)) CHECK((r.q == 0 && r.n == 0 && r.L == 3));

  const auto qm = edge_records(kPath, true);
  CHECK(qm[0].q_min == 1);
  CHECK(qm[2].q_min == 0);

  const Tree bad{{0, 1}};
  CHECK_THROWS_AS(edge_records(bad), MalformedTreeError);
}

TEST_CASE("record invariants on grown trees") {
  for (double a : {0.0, 0.5, 0.8}) {
    const Tree t = grow(A(a), 400, RngSpec{19, 4});
    const auto rec = edge_records(t, true);
    const std::int64_t tau = 400;
    std::uint64_t sum_q = 0;
    std::uint64_t sum_L = 0;
    for (const auto& r : rec) {
      CHECK(r.q <= r.n);
      CHECK(static_cast<std::int64_t>(r.n) <= tau - r.tau_e);
      CHECK(r.L == betweenness_of(r.n, tau));
      CHECK(r.q_min <= static_cast<std::int64_t>(r.q));
      sum_q += r.q;
      sum_L += r.L;
    }
    std::uint64_t root_deg = 0;
    for (std::size_t i = 1; i < t.order(); ++i) root_deg += t.parent[i] == 0;
    CHECK(sum_q == 400 - root_deg);
    CHECK(sum_L == all_pairs_distance(t));
  }
}

TEST_CASE("records csv") {
  std::ostringstream os;
  write_records_header(os, false);
  write_records(os, 0, edge_records(kPath), false);
  CHECK(os.str() == "rep,node,tau_e,q,n,L\n0,1,1,1,2,3\n0,2,2,1,1,4\n0,3,3,0,0,3\n");
  std::ostringstream qm;
  write_records_header(qm, true);
  CHECK(qm.str() == "rep,node,tau_e,q,n,L,q_min\n");
}

TEST_CASE("accumulation") {
  EnsembleStats star(1.0, 3);
  star.add(edge_records(kStar));
  CHECK(star.joint(0, 0) == 3);
  CHECK(star.joint_cells().size() == 1);
  CHECK(star.total_edges() == 3);

  EnsembleStats once(0.5, 3);
  once.add(edge_records(kPath));
  EnsembleStats twice(0.5, 3);
  twice.add(edge_records(kPath));
  twice.add(edge_records(kPath));
  EnsembleStats merged = once;
  merged.merge(once);
  CHECK(merged == twice);
  CHECK(twice.joint(2, 1) == 2);
  CHECK(twice.count_n[2] == 2);
  CHECK(twice.realizations == 2);

  EnsembleStats other(0.4, 3);
  CHECK_THROWS_AS(once.merge(other), MixedParameterError);
  EnsembleStats wrong_tau(0.5, 4);
  CHECK_THROWS_AS(once.merge(wrong_tau), MixedParameterError);
  CHECK_THROWS_AS(once.add(edge_records(Tree{{0, 0}})), MixedParameterError);
}

TEST_CASE("merge is associative and commutative") {
  const auto cfg = config(0.5, 700, 3, 5);
  std::vector<EnsembleStats> parts;
  for (std::uint64_t r = 0; r < 3; ++r) {
    EnsembleStats s(0.5, 700);
    s.add(realization(cfg, r));
    parts.push_back(s);
  }
  EnsembleStats left = parts[0];
  left.merge(parts[1]);
  left.merge(parts[2]);
  EnsembleStats right = parts[2];
  EnsembleStats tail = parts[1];
  tail.merge(parts[0]);
  right.merge(tail);
  CHECK(left == right);
  CHECK(left == run_ensemble(cfg, Exec::serial));
}

TEST_CASE("marginals and json") {
  const EnsembleStats s = run_ensemble(config(0.3, 3000, 4, 8));
  CHECK(s.total_edges() == 4 * 3000);
  std::vector<std::uint64_t> by_n(s.count_n.size(), 0);
  std::vector<std::uint64_t> by_q(s.count_q.size(), 0);
  for (const auto& [n, q, c] : s.joint_cells()) {
    by_n[n] += c;
    by_q[q] += c;
  }
  CHECK(by_n == s.count_n);
  CHECK(by_q == s.count_q);

  const EnsembleStats back = EnsembleStats::from_json(nlohmann::json::parse(s.to_json().dump()));
  CHECK(back == s);
}

TEST_CASE("serial and parallel ensembles agree") {
  const auto cfg = config(0.6, 5000, 12, 99);
  CHECK(run_ensemble(cfg, Exec::serial) == run_ensemble(cfg, Exec::parallel));
}

TEST_CASE("empirical ccdf") {
  EnsembleStats star(1.0, 50);
  star.add(edge_records(grow(A(1.0), 50, RngSpec{1, 0})));
  const auto c = empirical_ccdf(star, CcdfKind::n);
  REQUIRE(c.size() == 1);
  CHECK(c[0].support == 0);
  CHECK(c[0].ccdf == 1.0);

  const EnsembleStats s = run_ensemble(config(0.5, 10000, 20, 3));
  const auto cq = empirical_ccdf(s, CcdfKind::q);
  CHECK(cq[0].support == 0);
  CHECK(cq[0].ccdf == 1.0);
  for (std::size_t i = 1; i < cq.size(); ++i) CHECK(cq[i].ccdf <= cq[i - 1].ccdf);

  const NetworkTime t = NetworkTime::finite(10000);
  for (const auto& pt : empirical_ccdf(s, CcdfKind::n)) {
    if (pt.tail_count < 10 || pt.support == 0) continue;
    const double z = (pt.ccdf - ccdf_n(A(0.5), t, static_cast<std::int64_t>(pt.support))) / pt.std_error;
    CHECK(std::fabs(z) <= 4.0);
  }
  for (const auto& pt : cq) {
    if (pt.tail_count < 10 || pt.support == 0) continue;
    const double z = (pt.ccdf - ccdf_q(A(0.5), t, static_cast<std::int64_t>(pt.support))) / pt.std_error;
    CHECK(std::fabs(z) <= 4.0);
  }

  const EnsembleStats many = run_ensemble(config(0.5, 10000, 200, 4));
  const auto lq = empirical_ccdf(many, CcdfKind::load_given_q, 1);
  CHECK(lq[0].support == 1);
  CHECK(lq[0].ccdf == 1.0);
  for (const auto& pt : lq) {
    // Lambda <= q + 1 is certain
    if (pt.tail_count < 10 || pt.support <= 2 || pt.support > 100) continue;
    const std::uint64_t L = betweenness_of(static_cast<std::int64_t>(pt.support) - 1, 10000);
    const double z = (pt.ccdf - ccdf_load_given_q_finite(A(0.5), 10000, L, 1)) / pt.std_error;
    CHECK(std::fabs(z) <= 4.0);
  }
  const auto ld = empirical_ccdf(s, CcdfKind::load);
  CHECK(ld[0].support == 10000);
  CHECK(ld[0].ccdf == 1.0);

  CHECK_THROWS_AS(empirical_ccdf(star, CcdfKind::load_given_q, 1), EmptyConditionError);
}

TEST_CASE("conditional means") {
  const EnsembleStats s = run_ensemble(config(0.5, 5000, 10, 21));
  const auto m = conditional_means(s);
  for (const auto& pt : m.q_given_n)
    if (pt.condition == 1) CHECK(pt.mean == 1.0);
  for (const auto& pt : m.n_given_q)
    if (pt.condition == 0) CHECK(pt.mean == 0.0);

  const EnsembleStats er = run_ensemble(config(0.0, 20000, 5, 2));
  const auto me = conditional_means(er);
  REQUIRE(me.lambda_given_q[0].condition == 0);
  CHECK(me.lambda_given_q[0].mean == doctest::Approx(20000.0 / 20001.0).epsilon(1e-12));
  for (const auto& pt : me.q_given_n)
    if (pt.condition >= 2 && pt.condition <= 20 && pt.count > 100) {
      const double z = (pt.mean - mean_q_given_n(A(0.0), pt.condition)) / pt.std_error;
      CHECK(std::fabs(z) <= 4.0);
    }
}
