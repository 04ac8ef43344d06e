#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "treeload/errors.hpp"
#include "treeload/exact.hpp"
#include "treeload/growth.hpp"
#include "treeload/measure.hpp"
#include "treeload/oracle.hpp"

using namespace treeload;

namespace {

NetworkTime T(std::int64_t tau) { return NetworkTime::finite(tau); }
ModelParams A(double a) {
  ModelParams p;
  p.alpha = a;
  return p;
}
const ModelParams kHalf = ModelParams::from_ratio(1, 2);

Tree tree_of(std::vector<std::uint32_t> parent) { return Tree{std::move(parent)}; }

}  // namespace

TEST_CASE("dp_specific") {
  const StateGrid g0 = dp_specific(kHalf, 3, 3);
  CHECK(g0.at(0, 0) == 1.0);
  CHECK(g0.mass() == doctest::Approx(1.0).epsilon(1e-15));

  const StateGrid g = dp_specific(kHalf, 1, 2);
  CHECK(g.at(0, 0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(g.at(1, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(g.at(1, 0) == 0.0);

  const StateGrid big = dp_specific(kHalf, 1, 50);
  double worst = 0.0;
  for (std::int64_t n = 0; n <= 49; ++n)
    for (std::int64_t q = 0; q <= n; ++q)
      worst = std::max(worst, std::fabs(big.at(n, q) - p_specific(kHalf, 1, 50, n, q)));
  CHECK(worst <= 1e-10);

  for (double a : {0.1, 0.7}) {
    const StateGrid s = dp_specific(A(a), 17, 120);
    double w = 0.0;
    for (std::int64_t n = 0; n <= 103; ++n)
      for (std::int64_t q = 0; q <= n; ++q) w = std::max(w, std::fabs(s.at(n, q) - p_specific(A(a), 17, 120, n, q)));
    CHECK(w <= 1e-10);
  }

  CHECK_THROWS_AS(dp_specific(kHalf, 1, 2001), BoundError);
  CHECK_NOTHROW(dp_specific(kHalf, 3000, 3001, 4000));
  CHECK_THROWS_AS(dp_specific(kHalf, 4, 3), DomainError);
}

TEST_CASE("dp_joint") {
  const JointGrid g = dp_joint(kHalf, 2);
  CHECK(g.at(0, 0) == doctest::Approx(5.0 / 6).epsilon(1e-15));
  CHECK(g.at(1, 1) == doctest::Approx(1.0 / 6).epsilon(1e-15));

  const JointGrid star = dp_joint(A(1.0), 40);
  CHECK(star.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  for (std::int64_t n = 1; n < 40; ++n) CHECK(star.at(n, 0) == 0.0);

  const JointGrid big = dp_joint(kHalf, 300);
  double worst = 0.0;
  for (std::int64_t n = 0; n < 300; ++n)
    for (std::int64_t q = 0; q <= n; ++q) worst = std::max(worst, std::fabs(big.at(n, q) - p_joint(kHalf, T(300), n, q)));
  CHECK(worst <= 1e-9);

  CHECK_THROWS_AS(dp_joint(kHalf, 2001), BoundError);
}

TEST_CASE("enumerate_histories") {
  const HistoryTable h = enumerate_histories(kHalf, 2);
  REQUIRE(h.rational);
  CHECK(h.exact_at(0, 0) == mpq_class(5, 6));
  CHECK(h.exact_at(1, 1) == mpq_class(1, 6));
  CHECK(h.exact_at(1, 0) == 0);
  CHECK(h.mixed.at(0, 0) == doctest::Approx(5.0 / 6).epsilon(1e-15));

  const HistoryTable star = enumerate_histories(ModelParams::from_ratio(1, 1), 4);
  CHECK(star.exact_at(0, 0) == 1);
  CHECK(star.exact_mass() == 1);

  const HistoryTable er = enumerate_histories(ModelParams::from_ratio(0, 1), 3);
  for (std::int64_t n = 0; n < 3; ++n)
    for (std::int64_t q = 0; q <= n; ++q)
      CHECK(er.mixed.at(n, q) == doctest::Approx(p_joint(A(0.0), T(3), n, q)).epsilon(1e-12));

  CHECK_THROWS_AS(enumerate_histories(kHalf, 9), BoundError);
}

TEST_CASE("enumeration agrees with the DP and the closed form") {
  for (auto [num, den] : {std::pair{1L, 4L}, {1L, 2L}, {3L, 4L}, {1L, 1L}}) {
    const ModelParams p = ModelParams::from_ratio(num, den);
    for (std::int64_t tau = 2; tau <= 7; ++tau) {
      CAPTURE(p.alpha);
      CAPTURE(tau);
      const HistoryTable h = enumerate_histories(p, tau);
      CHECK(h.exact_mass() == 1);
      const JointGrid dp = dp_joint(p, tau);
      for (std::int64_t n = 0; n < tau; ++n)
        for (std::int64_t q = 0; q <= n; ++q) {
          const double e = h.exact_at(n, q).get_d();
          CHECK(std::fabs(e - dp.at(n, q)) <= 1e-12);
          CHECK(std::fabs(e - p_joint(p, T(tau), n, q)) <= 1e-12);
        }
      for (std::int64_t te = 1; te <= tau; ++te) {
        const StateGrid s = dp_specific(p, te, tau);
        for (std::int64_t n = 0; n <= tau - te; ++n)
          for (std::int64_t q = 0; q <= n; ++q)
            CHECK(std::fabs(h.per_tau_e[static_cast<std::size_t>(te - 1)].at(n, q) - s.at(n, q)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("enumeration in extended precision") {
  const ModelParams p = A(0.3);
  const HistoryTable h = enumerate_histories(p, 6);
  CHECK_FALSE(h.rational);
  double mass = 0.0;
  for (std::int64_t n = 0; n < 6; ++n)
    for (std::int64_t q = 0; q <= n; ++q) {
      mass += h.mixed.at(n, q);
      CHECK(std::fabs(h.mixed.at(n, q) - p_joint(p, T(6), n, q)) <= 1e-12);
    }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("enumeration does not depend on the thread count") {
  for (const ModelParams& p : {ModelParams::from_ratio(1, 3), A(0.45)}) {
    const HistoryTable s = enumerate_histories(p, 7, Exec::serial);
    const HistoryTable q = enumerate_histories(p, 7, Exec::parallel);
    CHECK(s.exact_mixed == q.exact_mixed);
    for (std::int64_t n = 0; n < 7; ++n)
      for (std::int64_t k = 0; k <= n; ++k) CHECK(s.mixed.at(n, k) == q.mixed.at(n, k));
  }
}

TEST_CASE("bruteforce betweenness") {
  const auto path = bruteforce_edge_betweenness(tree_of({0, 0, 1, 2}));
  CHECK(path[1] == 3);
  CHECK(path[2] == 4);
  CHECK(path[3] == 3);

  const auto star = bruteforce_edge_betweenness(tree_of({0, 0, 0, 0}));
  for (int i = 1; i < 4; ++i) CHECK(star[static_cast<std::size_t>(i)] == 3);

  for (double a : {0.0, 0.5, 0.9}) {
    const Tree t = grow(A(a), 499, RngSpec{11, static_cast<std::uint64_t>(a * 10)});
    const auto brute = bruteforce_edge_betweenness(t);
    const auto rec = edge_records(t);
    REQUIRE(rec.size() == 499);
    for (const auto& r : rec) CHECK(brute[r.node] == r.L);
  }

  CHECK_THROWS_AS(bruteforce_edge_betweenness(Tree{std::vector<std::uint32_t>(2001, 0)}), BoundError);
}
