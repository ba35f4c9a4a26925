#include "expint/suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "expint/heat_flow.hpp"
#include "expint/inequality_checks.hpp"
#include "expint/kernel_checks.hpp"
#include "expint/martingale_checks.hpp"
#include "expint/parallel.hpp"
#include "expint/test_function.hpp"

namespace expint {

bool SuiteResult::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const VerificationReport& r) { return !r.gating || r.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"kernel", "verify", "flow", "martingale", "scan", "all"};
  return names;
}

bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<double> counterexample_C_grid() {
  std::vector<double> c(50);
  for (int i = 0; i < 50; ++i) c[i] = std::pow(10.0, -3.0 + 6.0 * i / 49.0);
  return c;
}

std::vector<std::pair<double, double>> taylor_points(std::uint64_t seed) {
  std::vector<std::pair<double, double>> pts{{1.0, 1.0}, {2.0, 0.5}};
  std::mt19937_64 rng(derive_seed(seed, 0x7a));
  const Axis p{0.5, 5.0, Scale::log}, t{0.1, 10.0, Scale::log};
  while (pts.size() < 5) {
    const double a = draw_axis(p, rng);
    const double b = draw_axis(t, rng);
    pts.emplace_back(a, b);
  }
  return pts;
}

namespace {

void append(std::vector<VerificationReport>& out, std::vector<VerificationReport> more) {
  for (auto& r : more) out.push_back(std::move(r));
}

ScanDomain grid(std::vector<Axis> axes, int per_axis) {
  ScanDomain d;
  d.axes = std::move(axes);
  d.samples_per_axis = per_axis;
  return d;
}

SuiteResult kernel_suite(const SuiteOptions& o) {
  SuiteResult s{"kernel", {}, {}};
  const auto& t = o.tol;
  s.reports.push_back(check_kernel_positivity(10000, -30.0, 30.0, t));
  s.reports.push_back(check_kernel_roundtrip(2000, t));
  append(s.reports, check_F_boundary(t));
  s.reports.push_back(check_F_consistency(2000, t));
  s.reports.push_back(check_F_identities(2000, t));
  s.reports.push_back(check_G_derivative(2000, t));
  s.reports.push_back(check_F_bound_chain(2000, t));
  s.reports.push_back(check_monotonicity(10000));
  return s;
}

SuiteResult verify_suite(const SuiteOptions& o) {
  SuiteResult s{"verify", {}, {}};
  CheckContext ctx{o.tol, o.jobs, o.seed};
  append(s.reports, check_det_and_psd(grid({{0.1, 10.0, Scale::linear}, {0.0, 10.0, Scale::linear}}, 300), ctx));
  append(s.reports, check_F_bound(grid({{0.0, 40.0, Scale::linear}}, 10000), ctx));
  s.reports.push_back(check_G_sandwich(grid({{1e-3, 1e3, Scale::log}}, 10000), ctx));
  s.reports.push_back(check_backward_heat(grid({{0.2, 20.0, Scale::log}, {0.01, 100.0, Scale::log}}, 60), ctx));
  s.reports.push_back(check_heat_closed_form(grid({{1e-2, 50.0, Scale::log}}, 2000), ctx));
  s.reports.push_back(check_N_t_concavity(grid({{1e-2, 50.0, Scale::log}}, 2000), ctx));
  s.reports.push_back(check_four_point_N(o.samples.value_or(1000000), o.seed, ctx));
  for (const auto& [p, t] : taylor_points(o.seed)) s.reports.push_back(check_taylor_limit(p, t, ctx));
  append(s.reports, check_supersolution(grid({{0.1, 10.0, Scale::log}, {0.0, 100.0, Scale::linear}}, 100),
                                        o.samples.value_or(100000), o.seed, ctx));
  s.reports.push_back(scan_counterexample_M_sup(
      counterexample_C_grid(), grid({{0.1, 10.0, Scale::log}, {0.0, 20.0, Scale::linear}}, 100), ctx));
  return s;
}

SuiteResult scan_suite(const SuiteOptions& o) {
  SuiteResult s{"scan", {}, {}};
  CheckContext ctx{o.tol, o.jobs, o.seed};
  const std::uint64_t n = o.samples.value_or(1000000);
  s.reports.push_back(scan_four_point_M(n, o.seed, false, ctx));
  s.reports.push_back(scan_four_point_M(std::max<std::uint64_t>(1, n / 10), o.seed, true, ctx));
  return s;
}

SuiteResult flow_suite(const SuiteOptions& o) {
  SuiteResult s{"flow", {}, {}};
  const auto& tol = o.tol;
  // Twenty seeded trigonometric polynomials; each gets the monotone flow and
  // the endpoint chain. The per-function reports are folded into one each.
  struct Pair {
    VerificationReport flow, endpoint;
    std::string trace;
  };
  auto parts = parallel_blocks<Pair>(20, o.jobs, [&](std::size_t i) {
    const auto f = TestFunction::random_trig_poly(derive_seed(o.seed, i));
    auto [trace, rf] = check_flow_monotone(PositiveFunction::exp_of(f), 21, o.nodes, tol);
    return Pair{rf, check_endpoint_inequality(f, 1.0, tol), trace.to_text()};
  });
  auto fold = [&](const char* name, auto get) {
    VerificationReport r;
    r.check_name = name;
    r.seed = o.seed;
    r.domain = "20 random trig polynomials (J <= 5, |f'| <= 4)";
    MarginTracker tr;
    double ms = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const VerificationReport& one = get(parts[i]);
      r.tolerance = one.tolerance;
      MarginTracker m;
      m.min_margin = one.min_margin;
      m.witness = {static_cast<double>(i)};
      m.witness.insert(m.witness.end(), one.worst_witness.begin(), one.worst_witness.end());
      m.count = 1;
      tr.merge(m);
      ms += one.elapsed_ms;
    }
    tr.into(r);
    r.notes.push_back("witness: function index, then the per-function witness");
    r.finalize();
    r.elapsed_ms = ms;
    return r;
  };
  s.reports.push_back(fold("flow_monotone", [](const Pair& p) -> const VerificationReport& { return p.flow; }));
  s.reports.push_back(fold("endpoint_chain", [](const Pair& p) -> const VerificationReport& { return p.endpoint; }));
  for (std::size_t i = 0; i < parts.size(); ++i) s.exports.emplace_back("flow_trace_" + std::to_string(i), parts[i].trace);

  const std::uint64_t n = o.samples.value_or(1000000);
  const TestFunction sc(Family::trig_poly, 2, {1, 0.5, 1.0, 0.0, 1.0, M_PI / 2});
  s.reports.push_back(mc_endpoint_nd(sc, 2, n, o.seed, o.jobs, tol));
  const TestFunction bump(Family::gaussian_bump, 3, {1.0, 1.0, 0.0, 0.0, 0.0});
  s.reports.push_back(mc_endpoint_nd(bump, 3, n, derive_seed(o.seed, 3), o.jobs, tol));

  const SharpnessTable table = sharpness_demo(1.5, {2, 3, 4, 5, 6, 7, 8, 9, 10});
  append(s.reports, check_sharpness(table, tol));
  s.exports.emplace_back("sharpness_c1.5", table.to_text());
  return s;
}

SuiteResult martingale_suite(const SuiteOptions& o) {
  SuiteResult s{"martingale", {}, {}};
  MartingaleBatchOptions b;
  b.count = o.samples.value_or(10000);
  b.max_depth = o.depth;
  b.seed = o.seed;
  b.jobs = o.jobs;
  s.reports = run_martingale_batch(b, o.tol);
  s.reports.push_back(brownian_crosscheck(1.0, 0.5, 0.2, o.brownian_paths, o.seed, o.jobs, o.tol));
  return s;
}

}  // namespace

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt) {
  if (opt.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (name == "kernel") return kernel_suite(opt);
  if (name == "verify") return verify_suite(opt);
  if (name == "flow") return flow_suite(opt);
  if (name == "martingale") return martingale_suite(opt);
  if (name == "scan") return scan_suite(opt);
  if (name == "all") {
    SuiteResult all{"all", {}, {}};
    for (const auto& n : suite_names()) {
      if (n == "all") continue;
      SuiteResult r = run_suite(n, opt);
      append(all.reports, std::move(r.reports));
      for (auto& e : r.exports) all.exports.push_back(std::move(e));
    }
    return all;
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace expint
