#include <doctest.h>

#include <cmath>

#include "expint/errors.hpp"
#include "expint/inequality_checks.hpp"
#include "expint/martingale.hpp"
#include "expint/martingale_checks.hpp"
#include "expint/special_functions.hpp"

using namespace expint;

TEST_CASE("depth zero martingale is constant") {
  const auto m = DyadicMartingale::from_leaves({2.5});
  CHECK(m.depth() == 0);
  CHECK(m.value(0, 0) == 2.5);
  CHECK(quadratic_variation(m).values == std::vector<double>{0.0});
}

TEST_CASE("random martingales are consistent trees") {
  for (LeafLaw law : {LeafLaw::lognormal_leaves, LeafLaw::bounded_ratio}) {
    const auto m = DyadicMartingale::random(3, 1, law);
    REQUIRE(m.leaves().size() == 8);
    for (double v : m.leaves()) CHECK(v > 0.0);
    for (int n = 0; n < 3; ++n)
      for (std::size_t j = 0; j < m.level(n).size(); ++j)
        CHECK(m.value(n, j) == 0.5 * (m.value(n + 1, 2 * j) + m.value(n + 1, 2 * j + 1)));
  }
}

TEST_CASE("bounded ratio law keeps relative increments below 0.9") {
  const auto m = DyadicMartingale::random(10, 5, LeafLaw::bounded_ratio);
  for (int n = 1; n <= m.depth(); ++n)
    for (std::size_t j = 0; j < m.level(n).size(); ++j) {
      const double parent = m.value(n - 1, j / 2);
      CHECK(std::abs(m.value(n, j) - parent) / parent <= 0.9);
    }
}

TEST_CASE("quadratic variation of a single step") {
  const double a = 3.0, b = 1.0;
  const auto qv = quadratic_variation(DyadicMartingale::from_leaves({a, b}));
  for (double v : qv.values) CHECK(v == (a - b) * (a - b) / 4.0);
  const auto flat = quadratic_variation(DyadicMartingale::from_leaves({2.0, 2.0, 2.0, 2.0}));
  for (double v : flat.values) CHECK(v == 0.0);
}

TEST_CASE("main bound on a single step") {
  const double h = 0.5;
  const auto m = DyadicMartingale::from_leaves({1.0 + h, 1.0 - h});
  const MartingaleSummary s = summarize(m);
  CHECK(std::abs(s.lhs - 0.5 * std::log(4.0 / 3.0)) <= 1e-15);
  CHECK(std::abs(s.rhs_G - 0.5 * (G_eval(3.0) + G_eval(1.0))) <= 1e-15);
  CHECK(s.rhs_G >= s.lhs);
  CHECK(0.5 * s.rhs_log >= s.lhs);
  Tolerances tol;
  CHECK(check_theorem_martingale(m, tol).passed);
  CHECK(check_log_bounds(m, tol).passed);
}

TEST_CASE("constant martingale is an equality case") {
  const auto m = DyadicMartingale::from_leaves(std::vector<double>(16, 1.7));
  const MartingaleSummary s = summarize(m);
  CHECK(s.lhs == 0.0);
  CHECK(s.rhs_G == 0.0);
  CHECK(s.rhs_log == 0.0);
  Tolerances tol;
  const auto r = bellman_induction_check(m, BellmanKind::N, tol);
  CHECK(r.passed);
  CHECK(std::abs(r.min_margin) <= 1e-15);
}

TEST_CASE("Bellman step is the four-point inequality") {
  const auto m = DyadicMartingale::from_leaves({1.5, 0.5});
  const double direct = four_point_margin_N(1.0, 0.5, 0.0);
  Tolerances tol;
  const auto r = bellman_induction_check(m, BellmanKind::N, tol);
  CHECK(r.passed);
  CHECK(r.min_margin <= direct + 1e-15);
}

TEST_CASE("Bellman induction on deep random trees") {
  Tolerances tol;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto m = DyadicMartingale::random(10, seed, seed % 2 ? LeafLaw::bounded_ratio : LeafLaw::lognormal_leaves);
    for (BellmanKind k : {BellmanKind::N, BellmanKind::N_sup}) {
      const auto r = bellman_induction_check(m, k, tol);
      CHECK(r.passed);
      CHECK(r.min_margin >= -1e-9);
    }
    CHECK(check_tree_identities(m, tol).passed);
    CHECK(check_scale_invariance(m, 37.5, tol).passed);
  }
}

TEST_CASE("text format round trips exactly") {
  const auto m = DyadicMartingale::random(6, 11, LeafLaw::lognormal_leaves);
  const auto back = DyadicMartingale::parse(m.serialize());
  CHECK(back.leaves() == m.leaves());
  CHECK_THROWS_AS(DyadicMartingale::parse("2\n1 2 3\n"), FormatError);
  CHECK_THROWS_AS(DyadicMartingale::parse("1\n1 x\n"), FormatError);
  CHECK_THROWS_AS(DyadicMartingale::from_leaves({1.0, 2.0, 3.0}), FormatError);
  CHECK_THROWS_AS(DyadicMartingale::from_leaves({1.0, -2.0}), DomainError);
}

TEST_CASE("depth limits") {
  CHECK_THROWS_AS(DyadicMartingale::random(kMaxMartingaleDepth + 1, 1, LeafLaw::lognormal_leaves), ResourceError);
  CHECK_THROWS_AS(DyadicMartingale::random(-1, 1, LeafLaw::lognormal_leaves), DomainError);
  CHECK_THROWS_AS(parse_law("uniform"), FormatError);
}

TEST_CASE("manifest parsing") {
  const auto entries = parse_manifest("# trees\n3 7 lognormal_leaves\n\n5 9 bounded_ratio\n");
  REQUIRE(entries.size() == 2);
  CHECK(entries[1].depth == 5);
  CHECK(entries[1].seed == 9);
  CHECK(entries[1].law == LeafLaw::bounded_ratio);
  CHECK_THROWS_AS(parse_manifest("3 seven lognormal_leaves\n"), FormatError);
  Tolerances tol;
  for (const auto& r : run_martingale_manifest(entries, 2, tol)) CHECK(r.passed);
}

TEST_CASE("batch is independent of the worker count") {
  Tolerances tol;
  MartingaleBatchOptions opt;
  opt.count = 300;
  opt.jobs = 1;
  const auto a = run_martingale_batch(opt, tol);
  opt.jobs = 3;
  const auto b = run_martingale_batch(opt, tol);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].passed);
    CHECK(to_json(a[i], false) == to_json(b[i], false));
  }
}

TEST_CASE("Brownian cross-check of the stopping identity") {
  Tolerances tol;
  const auto r = brownian_crosscheck(1.0, 0.5, 0.2, 4000, 42, 2, tol, 2e-3);
  CHECK_FALSE(r.gating);
  CHECK(r.min_margin >= -3.0);
}
