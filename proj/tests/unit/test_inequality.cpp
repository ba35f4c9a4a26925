#include <doctest.h>

#include <cmath>
#include <random>

#include "expint/errors.hpp"
#include "expint/inequality_checks.hpp"
#include "expint/special_functions.hpp"
#include "expint/suites.hpp"

using namespace expint;

namespace {

ScanDomain grid2(Axis a, Axis b, int n) {
  ScanDomain d;
  d.axes = {a, b};
  d.samples_per_axis = n;
  return d;
}

ScanDomain grid1(Axis a, int n) {
  ScanDomain d;
  d.axes = {a};
  d.samples_per_axis = n;
  return d;
}

double metric(const VerificationReport& r, const std::string& name) {
  for (const auto& [k, v] : r.metrics)
    if (k == name) return v;
  FAIL("missing metric " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("modified Hessian at (1, 0)") {
  const BellmanMatrix A = bellman_matrix(1.0, 0.0);
  const double s = std::exp(A.log_scale);
  CHECK(std::abs(A.a11 * s) <= 1e-9);
  CHECK(std::abs(A.a12 * s) <= 1e-9);
  CHECK(A.a22 * s == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(A.det_ratio() <= 1e-9);
  CHECK(A.min_eigenvalue >= -1e-8 * A.norm());
}

TEST_CASE("modified Hessian is singular and positive semidefinite") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> X(0.1, 10.0), Y(0.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const BellmanMatrix A = bellman_matrix(X(rng), Y(rng));
    INFO("x = " << A.x << ", y = " << A.y);
    CHECK(A.det_ratio() <= 1e-7);
    CHECK(A.a22 > 0.0);
    CHECK(A.min_eigenvalue >= -1e-8 * A.norm());
  }
}

TEST_CASE("det and psd reports") {
  CheckContext ctx;
  const auto reports = check_det_and_psd(grid2({0.1, 10.0}, {0.0, 10.0}, 60), ctx);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) CHECK(r.passed);
  const auto point = check_det_and_psd(grid2({1.0, 1.0}, {0.0, 0.0}, 1), ctx);
  CHECK(point[1].passed);
  CHECK(point[1].samples == 1);
  CHECK_THROWS_AS(check_det_and_psd(ScanDomain{}, ctx), std::invalid_argument);
}

TEST_CASE("F pointwise bound on a grid including both ends") {
  CheckContext ctx;
  const auto reports = check_F_bound(grid1({0.0, 40.0}, 2001), ctx);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    CHECK(r.passed);
    CHECK(r.min_margin > 0.0);
  }
  const auto at40 = check_F_bound(grid1({40.0, 40.0}, 1), ctx);
  CHECK(at40[0].passed);
}

TEST_CASE("G sandwich") {
  CheckContext ctx;
  CHECK(check_G_sandwich(grid1({1e-3, 1e3, Scale::log}, 2000), ctx).passed);
  const auto one = check_G_sandwich(grid1({1.0, 1.0}, 1), ctx);
  CHECK(metric(one, "min_upper_margin") > 0.0);
  CHECK(metric(one, "min_lower_margin") > 0.0);
  CHECK_THROWS_AS(check_G_sandwich(grid1({0.0, 1.0}, 10), ctx), DomainError);
  CHECK_THROWS_AS(check_G_sandwich(grid1({-1.0, 1.0}, 10), ctx), DomainError);
}

TEST_CASE("backward heat equation") {
  CheckContext ctx;
  const auto fd = check_backward_heat(grid2({0.2, 20.0, Scale::log}, {0.01, 100.0, Scale::log}, 30), ctx);
  CHECK(fd.passed);
  CHECK(metric(fd, "max_relative_residual") <= 1e-5);
  const auto with_t0 = check_backward_heat(grid2({0.2, 20.0, Scale::log}, {0.0, 100.0}, 10), ctx);
  CHECK(metric(with_t0, "excluded_t0_points") == 10.0);
  CHECK(check_heat_closed_form(grid1({1e-2, 50.0, Scale::log}, 500), ctx).passed);
  const auto conc = check_N_t_concavity(grid1({1e-2, 50.0, Scale::log}, 500), ctx);
  CHECK(conc.passed);
  CHECK(std::abs(metric(conc, "phi_at_max_s")) < 1e-5);
}

TEST_CASE("four-point margins") {
  CHECK(four_point_margin_N(1.0, 0.0, 0.3) == 0.0);
  const double m = four_point_margin_N(1.0, 0.5, 0.0);
  CHECK(m == N_eval(1.5, 0.25) + N_eval(0.5, 0.25) - 0.0);
  CHECK(m >= 0.0);
  CHECK(four_point_margin_N_sup(2.0, 0.0, 1.0) == 0.0);
  CHECK(four_point_margin_M(2.0, 1.0, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(four_point_margin_N(1.0, 1.5, 0.0), DomainError);
}

TEST_CASE("four-point inequality for N on random samples") {
  CheckContext ctx;
  const auto r = check_four_point_N(100000, 42, ctx);
  CHECK(r.passed);
  CHECK(r.min_margin >= -1e-9);
}

TEST_CASE("fourth-order Taylor coefficient") {
  CheckContext ctx;
  for (auto [p, t] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const auto r = check_taylor_limit(p, t, ctx);
    CHECK(r.passed);
    CHECK(r.min_margin >= -0.02);
    CHECK_FALSE(r.notes.empty());
  }
}

TEST_CASE("supersolution") {
  CheckContext ctx;
  const auto reports = check_supersolution(grid2({0.1, 10.0, Scale::log}, {0.0, 100.0}, 40), 100000, 42, ctx);
  REQUIRE(reports.size() == 4);
  for (const auto& r : reports) CHECK(r.passed);
}

TEST_CASE("candidate M fails for every constant") {
  CheckContext ctx;
  const ScanDomain dom = grid2({0.1, 10.0, Scale::log}, {0.0, 20.0}, 60);
  const auto all = scan_counterexample_M_sup(counterexample_C_grid(), dom, ctx);
  CHECK(all.passed);
  CHECK(metric(all, "C_values") == 50.0);
  const auto one = scan_counterexample_M_sup({1.0}, dom, ctx);
  CHECK(one.passed);
  REQUIRE(one.worst_witness.size() == 3);
  const BellmanMatrix A = candidate_matrix(1.0, one.worst_witness[1], one.worst_witness[2]);
  CHECK(A.min_eigenvalue < 0.0);
  CHECK_THROWS_AS(scan_counterexample_M_sup({}, dom, ctx), std::invalid_argument);
}

TEST_CASE("exploratory four-point scan for M never gates") {
  CheckContext ctx;
  const auto r = scan_four_point_M(20000, 42, false, ctx);
  CHECK_FALSE(r.gating);
  const auto b0 = scan_four_point_M(2000, 42, true, ctx);
  CHECK_FALSE(b0.gating);
}
