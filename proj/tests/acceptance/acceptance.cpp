// Acceptance run: one PASS/FAIL line per criterion.
//   expint_acceptance              all criteria
//   expint_acceptance --criterion N

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "expint/heat_flow.hpp"
#include "expint/inequality_checks.hpp"
#include "expint/kernel.hpp"
#include "expint/kernel_checks.hpp"
#include "expint/martingale_checks.hpp"
#include "expint/parallel.hpp"
#include "expint/special_functions.hpp"
#include "expint/suites.hpp"

using namespace expint;

namespace {

// Pinned acceptance tolerances and budgets.
constexpr double kFValueTol = 1e-12;
constexpr double kFSlopeTol = 1e-6;
constexpr double kFCurvatureTol = 1e-4;
constexpr double kDetTol = 1e-7;
constexpr double kPsdTol = 1e-8;
constexpr double kFBoundTol = 1e-9;
constexpr double kSandwichTol = 1e-10;
constexpr double kHeatTol = 1e-9;
constexpr double kFourPointTol = 1e-9;
constexpr double kTaylorTol = 0.02;
constexpr double kFlowTol = 1e-12;
constexpr double kEndpointTol = 1e-10;
constexpr double kMcSe = 3.0;
constexpr double kSharpnessRhsTol = 1e-3;
constexpr double kMartingaleTol = 1e-9;
constexpr double kCounterexampleTol = 1e-8;

constexpr double kBudgetPositivity = 1.0;
constexpr double kBudgetDet = 30.0;
constexpr double kBudgetFourPoint = 60.0;
constexpr double kBudgetFlow = 300.0;
constexpr double kBudgetMartingale = 120.0;

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Tolerances pinned() {
  Tolerances t;
  t.set("F_boundary_value", kFValueTol);
  t.set("F_boundary_slope", kFSlopeTol);
  t.set("F_boundary_curvature", kFCurvatureTol);
  t.set("det", kDetTol);
  t.set("psd", kPsdTol);
  t.set("F_bound", kFBoundTol);
  t.set("sandwich", kSandwichTol);
  t.set("heat_closed_form", kHeatTol);
  t.set("four_point", kFourPointTol);
  t.set("taylor", kTaylorTol);
  t.set("flow", kFlowTol);
  t.set("endpoint", kEndpointTol);
  t.set("mc_se_multiplier", kMcSe);
  t.set("sharpness_rhs", kSharpnessRhsTol);
  t.set("martingale", kMartingaleTol);
  t.set("counterexample", kCounterexampleTol);
  return t;
}

CheckContext context() { return CheckContext{pinned(), default_jobs(), kSeed}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ScanDomain grid(std::vector<Axis> axes, int n) {
  ScanDomain d;
  d.axes = std::move(axes);
  d.samples_per_axis = n;
  return d;
}

bool all_passed(const std::vector<VerificationReport>& rs) {
  for (const auto& r : rs)
    if (!r.passed) return false;
  return !rs.empty();
}

Outcome kernel_positivity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = check_kernel_positivity(10000, -30.0, 30.0, pinned());
  const double s = seconds_since(t0);
  return {r.passed && s < kBudgetPositivity, fmt("min margin %.3g, %.3f s", r.min_margin, s)};
}

Outcome F_boundary() {
  const auto rs = check_F_boundary(pinned());
  const double v = std::abs(F_eval(0.0));
  return {all_passed(rs) && v <= kFValueTol,
          fmt("|F(0)| = %.3g, slope margin %.3g, curvature margin %.3g", v, rs.at(1).min_margin, rs.at(2).min_margin)};
}

Outcome monge_ampere() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rs = check_det_and_psd(grid({{0.1, 10.0}, {0.0, 10.0}}, 300), context());
  const double s = seconds_since(t0);
  return {all_passed(rs) && rs.at(0).samples == 90000 && s < kBudgetDet,
          fmt("det margin %.3g, psd margin %.3g, %.2f s", rs.at(0).min_margin, rs.at(1).min_margin, s)};
}

Outcome pointwise_bound() {
  const auto rs = check_F_bound(grid({{0.0, 40.0}}, 10000), context());
  return {all_passed(rs) && rs.size() == 2,
          fmt("log margins %.4g (3 sqrt(2 pi)) and %.4g (10)", rs.at(0).min_margin, rs.at(1).min_margin)};
}

Outcome G_sandwich() {
  const auto r = check_G_sandwich(grid({{1e-3, 1e3, Scale::log}}, 10000), context());
  return {r.passed && r.min_margin >= -kSandwichTol, fmt("min margin %.3g", r.min_margin)};
}

Outcome backward_heat() {
  const auto r = check_heat_closed_form(grid({{1e-2, 50.0, Scale::log}}, 10000), context());
  return {r.passed && r.min_margin >= -kHeatTol, fmt("max |residual| %.3g", -r.min_margin)};
}

Outcome four_point_N() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = check_four_point_N(1000000, kSeed, context());
  const double s = seconds_since(t0);
  return {r.passed && r.min_margin >= -kFourPointTol && s < kBudgetFourPoint,
          fmt("min margin %.3g over %.0f samples, %.2f s", r.min_margin, static_cast<double>(r.samples), s)};
}

Outcome taylor() {
  const auto pts = taylor_points(kSeed);
  bool ok = pts.size() == 5;
  double worst = 0.0;
  for (const auto& [p, t] : pts) {
    const auto r = check_taylor_limit(p, t, context());
    ok = ok && r.passed;
    worst = std::min(worst, r.min_margin);
  }
  return {ok, fmt("worst relative mismatch %.3g at 5 points", -worst)};
}

Outcome flow_monotone() {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerances tol = pinned();
  const auto rs = parallel_blocks<VerificationReport>(20, default_jobs(), [&](std::size_t i) {
    const auto f = TestFunction::random_trig_poly(derive_seed(kSeed, i));
    return check_flow_monotone(PositiveFunction::exp_of(f), 21, 128, tol).second;
  });
  const double s = seconds_since(t0);
  double worst = INFINITY;
  for (const auto& r : rs) worst = std::min(worst, r.min_margin);
  return {all_passed(rs) && s < kBudgetFlow, fmt("20 functions, worst margin %.3g, %.1f s", worst, s)};
}

Outcome endpoint_chain() {
  const Tolerances tol = pinned();
  auto rs = parallel_blocks<VerificationReport>(20, default_jobs(), [&](std::size_t i) {
    return check_endpoint_inequality(TestFunction::random_trig_poly(derive_seed(kSeed, i)), 1.0, tol);
  });
  double worst = INFINITY;
  for (const auto& r : rs) worst = std::min(worst, r.min_margin);
  const TestFunction sc(Family::trig_poly, 2, {1, 0.5, 1.0, 0.0, 1.0, M_PI / 2});
  const auto mc2 = mc_endpoint_nd(sc, 2, 1000000, kSeed, default_jobs(), tol);
  const TestFunction bump(Family::gaussian_bump, 3, {1.0, 1.0, 0.0, 0.0, 0.0});
  const auto mc3 = mc_endpoint_nd(bump, 3, 1000000, derive_seed(kSeed, 3), default_jobs(), tol);
  return {all_passed(rs) && mc2.passed && mc3.passed,
          fmt("1-D worst margin %.3g; MC z-margins %.3g (2-D), %.3g (3-D)", worst, mc2.min_margin, mc3.min_margin)};
}

Outcome sharpness() {
  const SharpnessTable t = sharpness_demo(1.5, {2, 3, 4, 5, 6, 7, 8, 9, 10});
  bool increasing = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) increasing = increasing && t.rows[i].lhs > t.rows[i - 1].lhs;
  const double last = t.rows.back().rhs, prev = t.rows[t.rows.size() - 2].rhs;
  const double change = std::abs(last - prev) / std::abs(last);
  return {increasing && change <= kSharpnessRhsTol,
          std::string("lhs ") + (increasing ? "strictly increasing" : "NOT increasing") +
              fmt("; rhs relative change over the last step %.4g (limit %.0e)", change, kSharpnessRhsTol)};
}

std::vector<VerificationReport> martingale_batch(double* elapsed) {
  static std::vector<VerificationReport> cached;
  static double cached_s = 0.0;
  if (cached.empty()) {
    const auto t0 = std::chrono::steady_clock::now();
    MartingaleBatchOptions o;
    o.count = 10000;
    o.max_depth = 10;
    o.seed = kSeed;
    o.jobs = default_jobs();
    cached = run_martingale_batch(o, pinned());
    cached_s = seconds_since(t0);
  }
  if (elapsed) *elapsed = cached_s;
  return cached;
}

const VerificationReport& find(const std::vector<VerificationReport>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.check_name == name) return r;
  std::fprintf(stderr, "missing report %s\n", name.c_str());
  std::exit(2);
}

Outcome martingale_theorem() {
  double s = 0.0;
  const auto rs = martingale_batch(&s);
  const auto& th = find(rs, "martingale_theorem");
  const auto& lb = find(rs, "martingale_log_bounds");
  return {th.passed && lb.passed && th.samples == 10000 && s < kBudgetMartingale,
          fmt("margins %.3g (G bound), %.3g (log bounds), %.1f s", th.min_margin, lb.min_margin, s)};
}

Outcome bellman_induction() {
  const auto rs = martingale_batch(nullptr);
  const auto& n = find(rs, "bellman_induction_N");
  const auto& ns = find(rs, "bellman_induction_N_sup");
  return {n.passed && ns.passed, fmt("min step margins %.3g (N), %.3g (N sup)", n.min_margin, ns.min_margin)};
}

Outcome supersolution() {
  const auto rs = check_supersolution(grid({{0.1, 10.0, Scale::log}, {0.0, 100.0}}, 100), 100000, kSeed, context());
  bool ok = rs.size() == 4 && all_passed(rs);
  return {ok, fmt("boundary %.3g, residual %.3g, four-point %.3g", rs.at(0).min_margin, rs.at(1).min_margin,
                  rs.at(3).min_margin)};
}

Outcome counterexample() {
  const auto r = scan_counterexample_M_sup(counterexample_C_grid(),
                                           grid({{0.1, 10.0, Scale::log}, {0.0, 20.0}}, 100), context());
  return {r.passed && counterexample_C_grid().size() == 50, fmt("weakest witness margin %.3g over 50 C values", r.min_margin)};
}

std::string machine_dump(const SuiteResult& s) {
  std::string out;
  for (const auto& r : s.reports) out += to_json(r, false) + "\n";
  for (const auto& [stem, text] : s.exports) out += stem + "\n" + text;
  return out;
}

Outcome determinism() {
  std::string mismatched;
  for (const auto& name : suite_names()) {
    if (name == "all") continue;
    SuiteOptions o;
    o.seed = kSeed;
    o.jobs = default_jobs();
    const std::string a = machine_dump(run_suite(name, o));
    const std::string b = machine_dump(run_suite(name, o));
    o.jobs = 3;
    const std::string c = machine_dump(run_suite(name, o));
    if (a != b || a != c) mismatched += " " + name;
  }
  return {mismatched.empty(), mismatched.empty() ? "every suite byte-identical across reruns and worker counts"
                                                 : "differs:" + mismatched};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "kernel positivity", kernel_positivity},
      {2, "F boundary data", F_boundary},
      {3, "Monge-Ampere identity", monge_ampere},
      {4, "pointwise bound", pointwise_bound},
      {5, "G sandwich", G_sandwich},
      {6, "backward heat residual", backward_heat},
      {7, "four-point inequality for N", four_point_N},
      {8, "Taylor coefficient", taylor},
      {9, "flow monotonicity", flow_monotone},
      {10, "endpoint chain", endpoint_chain},
      {11, "sharpness demo", sharpness},
      {12, "martingale theorem", martingale_theorem},
      {13, "Bellman induction", bellman_induction},
      {14, "supersolution", supersolution},
      {15, "counterexample scan", counterexample},
      {16, "determinism", determinism},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
    return 2;
  }

  int failed = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %2d  %-28s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed ? 1 : 0;
}
