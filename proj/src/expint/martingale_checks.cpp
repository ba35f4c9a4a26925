#include "expint/martingale_checks.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "expint/errors.hpp"
#include "expint/inequality_checks.hpp"
#include "expint/parallel.hpp"
#include "expint/special_functions.hpp"

namespace expint {

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
};

// Neumaier-compensated mean.
struct Mean {
  double sum = 0.0, comp = 0.0;
  std::size_t n = 0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
    ++n;
  }
  double value() const { return (sum + comp) / static_cast<double>(n); }
};

double bellman(BellmanKind k, double p, double t) { return k == BellmanKind::N ? N_eval(p, t) : N_sup_eval(p, t); }

const char* kind_name(BellmanKind k) { return k == BellmanKind::N ? "N" : "N_sup"; }

std::string tree_domain(const DyadicMartingale& m) { return "depth " + std::to_string(m.depth()); }

VerificationReport base_report(const char* name, double tolerance, const DyadicMartingale& m) {
  VerificationReport r;
  r.check_name = name;
  r.tolerance = tolerance;
  r.samples = m.leaves().size();
  r.domain = tree_domain(m);
  return r;
}

}  // namespace

MartingaleSummary summarize(const DyadicMartingale& m, double lambda) {
  // Scaled values are read on the fly; rebuilding the tree from lambda * leaves
  // would re-round them onto a new grid.
  std::vector<double> qv(m.leaves().size(), 0.0);
  for (int n = 1; n <= m.depth(); ++n)
    for (std::size_t i = 0; i < qv.size(); ++i) {
      const std::size_t shift = static_cast<std::size_t>(m.depth() - n);
      const double d = lambda * m.value(n, i >> shift) - lambda * m.value(n - 1, i >> (shift + 1));
      qv[i] += d * d;
    }
  Mean log_xi, g, lg;
  const auto& xi = m.leaves();
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double v = lambda * xi[i], q = qv[i];
    log_xi.add(std::log(v));
    g.add(q > 0.0 ? G_eval(v / std::sqrt(q)) : 0.0);
    lg.add(std::log1p(q / (v * v)));
  }
  MartingaleSummary s;
  s.lhs = std::log(lambda * m.value(0, 0)) - log_xi.value();
  s.rhs_G = g.value();
  s.rhs_log = lg.value();
  return s;
}

VerificationReport check_theorem_martingale(const DyadicMartingale& m, const Tolerances& tol) {
  const MartingaleSummary s = summarize(m);
  auto r = base_report("martingale_theorem", tol.get("martingale"), m);
  r.min_margin = s.rhs_G - s.lhs;
  r.worst_witness = {static_cast<double>(m.depth())};
  r.metric("lhs", s.lhs);
  r.metric("rhs", s.rhs_G);
  r.finalize();
  return r;
}

VerificationReport check_log_bounds(const DyadicMartingale& m, const Tolerances& tol) {
  const MartingaleSummary s = summarize(m);
  auto r = base_report("martingale_log_bounds", tol.get("martingale"), m);
  const double full = s.rhs_log - s.lhs, half = 0.5 * s.rhs_log - s.lhs;
  r.min_margin = std::min(full, half);
  r.worst_witness = {half <= full ? 0.5 : 1.0};
  r.metric("lhs", s.lhs);
  r.metric("rhs_factor_1", s.rhs_log);
  r.metric("rhs_factor_half", 0.5 * s.rhs_log);
  r.finalize();
  return r;
}

VerificationReport bellman_induction_check(const DyadicMartingale& m, BellmanKind which, const Tolerances& tol) {
  const std::string name = std::string("bellman_induction_") + kind_name(which);
  auto r = base_report(name.c_str(), tol.get("martingale"), m);
  const auto qv = partial_variation(m);
  MarginTracker tr;
  std::vector<double> chain{bellman(which, m.value(0, 0), 0.0)};
  for (int n = 1; n <= m.depth(); ++n) {
    const auto& parents = m.level(n - 1);
    Mean level_mean;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      const double p = parents[i], t = qv[static_cast<std::size_t>(n) - 1][i];
      const double lo = m.value(n, 2 * i + 1), hi = m.value(n, 2 * i);
      const double tn = qv[static_cast<std::size_t>(n)][2 * i];  // equal for both children
      const double nh = bellman(which, hi, tn), nl = bellman(which, lo, tn);
      const double step = 0.5 * (nh + nl) - bellman(which, p, t);
      tr.observe_at(step, n - 1, static_cast<double>(i), p, 0.5 * std::abs(hi - lo), t);
      level_mean.add(nh);
      level_mean.add(nl);
    }
    chain.push_back(level_mean.value());
  }
  // Chain steps carry witness (-1, n).
  for (std::size_t n = 1; n < chain.size(); ++n) tr.observe_at(chain[n] - chain[n - 1], -1, static_cast<double>(n));
  tr.into(r);
  r.samples = m.leaves().size() - 1 + static_cast<std::uint64_t>(m.depth());
  r.metric("chain_start", chain.front());
  r.metric("chain_end", chain.back());
  r.finalize();
  return r;
}

VerificationReport check_tree_identities(const DyadicMartingale& m, const Tolerances& tol) {
  auto r = base_report("tree_identities", tol.get("tree_identity"), m);
  MarginTracker tr;
  const double mean0 = m.value(0, 0);
  for (int n = 0; n <= m.depth(); ++n) {
    const auto& lv = m.level(n);
    double sum = 0.0;
    for (double v : lv) sum += v;
    tr.observe_at(-std::abs(sum / static_cast<double>(lv.size()) - mean0), 0, n);
    if (n < m.depth())
      for (std::size_t i = 0; i < lv.size(); ++i)
        tr.observe_at(-std::abs(lv[i] - 0.5 * (m.value(n + 1, 2 * i) + m.value(n + 1, 2 * i + 1))), 1, n,
                      static_cast<double>(i));
  }
  const auto qv = quadratic_variation(m);
  Mean eq, e2;
  for (std::size_t i = 0; i < qv.values.size(); ++i) {
    eq.add(qv.values[i]);
    e2.add(m.leaves()[i] * m.leaves()[i]);
  }
  const double ortho = eq.value() - (e2.value() - mean0 * mean0);
  tr.observe_at(-std::abs(ortho) / (mean0 * mean0), 2);
  tr.into(r);
  r.samples = m.leaves().size();
  r.metric("E_qv", eq.value());
  r.metric("E_xiN2_minus_xi02", e2.value() - mean0 * mean0);
  r.notes.push_back("witness kind 0: E xi_n drift at level n; 1: parent/children mismatch; 2: orthogonality");
  r.finalize();
  return r;
}

VerificationReport check_scale_invariance(const DyadicMartingale& m, double lambda, const Tolerances& tol) {
  if (!(lambda > 0.0)) throw DomainError("scale invariance: lambda must be > 0");
  const MartingaleSummary a = summarize(m), b = summarize(m, lambda);
  auto r = base_report("scale_invariance", tol.get("martingale"), m);
  MarginTracker tr;
  tr.observe_at(-std::abs((a.rhs_G - a.lhs) - (b.rhs_G - b.lhs)), 0, lambda);
  tr.observe_at(-std::abs((a.rhs_log - a.lhs) - (b.rhs_log - b.lhs)), 1, lambda);
  tr.into(r);
  r.finalize();
  return r;
}

namespace {

std::vector<VerificationReport> check_tree(const DyadicMartingale& m, double lambda, const Tolerances& tol) {
  return {check_theorem_martingale(m, tol),
          check_log_bounds(m, tol),
          bellman_induction_check(m, BellmanKind::N, tol),
          bellman_induction_check(m, BellmanKind::N_sup, tol),
          check_tree_identities(m, tol),
          check_scale_invariance(m, lambda, tol)};
}

// Folds per-tree reports into one report per check, keyed by the tree index.
std::vector<VerificationReport> aggregate(const std::vector<std::vector<VerificationReport>>& per_tree,
                                          const std::string& domain, std::uint64_t seed) {
  std::vector<VerificationReport> out;
  if (per_tree.empty()) return out;
  const std::size_t checks = per_tree.front().size();
  for (std::size_t c = 0; c < checks; ++c) {
    VerificationReport r;
    r.check_name = per_tree.front()[c].check_name;
    r.tolerance = per_tree.front()[c].tolerance;
    r.domain = domain;
    r.seed = seed;
    MarginTracker tr;
    std::uint64_t leaves = 0;
    for (std::size_t i = 0; i < per_tree.size(); ++i) {
      const auto& t = per_tree[i][c];
      std::vector<double> w{static_cast<double>(i)};
      w.insert(w.end(), t.worst_witness.begin(), t.worst_witness.end());
      MarginTracker one;
      one.min_margin = t.min_margin;
      one.witness = std::move(w);
      one.count = 1;
      tr.merge(one);
      leaves += t.samples;
    }
    tr.into(r);
    r.samples = per_tree.size();
    r.metric("total_leaves", static_cast<double>(leaves));
    r.notes.push_back("witness: tree index, then the per-tree witness");
    r.finalize();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<VerificationReport> run_trees(std::size_t count, int jobs, const Tolerances& tol, const std::string& domain,
                                          std::uint64_t seed,
                                          const std::function<std::pair<DyadicMartingale, double>(std::size_t)>& make) {
  Stopwatch sw;
  constexpr std::size_t block = 64;
  const std::size_t blocks = (count + block - 1) / block;
  auto parts = parallel_blocks<std::vector<std::vector<VerificationReport>>>(blocks, jobs, [&](std::size_t b) {
    std::vector<std::vector<VerificationReport>> v;
    for (std::size_t i = b * block; i < std::min(count, (b + 1) * block); ++i) {
      auto [m, lambda] = make(i);
      v.push_back(check_tree(m, lambda, tol));
    }
    return v;
  });
  std::vector<std::vector<VerificationReport>> all;
  for (auto& p : parts)
    for (auto& v : p) all.push_back(std::move(v));
  auto out = aggregate(all, domain, seed);
  const double ms = sw.ms();
  for (auto& r : out) r.elapsed_ms = ms;
  return out;
}

}  // namespace

std::vector<VerificationReport> run_martingale_batch(const MartingaleBatchOptions& opt, const Tolerances& tol) {
  if (opt.count == 0) throw std::invalid_argument("martingale batch: count must be positive");
  if (opt.max_depth < 0 || opt.max_depth > kMaxMartingaleDepth)
    throw ResourceError("martingale batch: depth must lie in [0, 16]");
  const std::string domain = std::to_string(opt.count) + " trees, depth uniform in [0, " +
                             std::to_string(opt.max_depth) + "], laws alternating";
  return run_trees(static_cast<std::size_t>(opt.count), opt.jobs, tol, domain, opt.seed, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(opt.seed, i));
    const int depth = std::uniform_int_distribution<int>(0, opt.max_depth)(rng);
    const double lambda = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(rng));
    const LeafLaw law = (i % 2 == 0) ? LeafLaw::lognormal_leaves : LeafLaw::bounded_ratio;
    return std::make_pair(DyadicMartingale::random(depth, rng(), law), lambda);
  });
}

std::vector<VerificationReport> run_martingale_manifest(const std::vector<ManifestEntry>& entries, int jobs,
                                                        const Tolerances& tol) {
  if (entries.empty()) throw std::invalid_argument("martingale manifest is empty");
  const std::string domain = "manifest of " + std::to_string(entries.size()) + " trees";
  return run_trees(entries.size(), jobs, tol, domain, 0, [&](std::size_t i) {
    const auto& e = entries[i];
    std::mt19937_64 rng(derive_seed(e.seed, 1));
    const double lambda = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(rng));
    return std::make_pair(DyadicMartingale::random(e.depth, e.seed, e.law), lambda);
  });
}

VerificationReport brownian_crosscheck(double p, double a, double t, std::uint64_t paths, std::uint64_t seed, int jobs,
                                       const Tolerances& tol, double step_fraction) {
  Stopwatch sw;
  if (!(a > 0.0) || !(p > a)) throw DomainError("brownian_crosscheck: need 0 < a < p");
  if (!(t >= 0.0)) throw DomainError("brownian_crosscheck: t must be >= 0");
  if (paths < 2) throw std::invalid_argument("brownian_crosscheck: need at least 2 paths");
  if (!(step_fraction > 0.0 && step_fraction <= 0.5)) throw DomainError("brownian_crosscheck: bad step fraction");
  const auto K = static_cast<std::int64_t>(std::llround(1.0 / step_fraction));
  const double delta = (a / static_cast<double>(K)) * (a / static_cast<double>(K));
  struct Sums {
    double tau = 0, tau2 = 0, up = 0, n = 0, n2 = 0;
  };
  constexpr std::uint64_t block = 256;
  const std::size_t blocks = static_cast<std::size_t>((paths + block - 1) / block);
  auto parts = parallel_blocks<Sums>(blocks, jobs, [&](std::size_t b) {
    Sums s;
    std::mt19937_64 rng(derive_seed(seed, b));
    for (std::uint64_t i = b * block; i < std::min<std::uint64_t>(paths, (b + 1) * block); ++i) {
      std::int64_t k = 0;
      std::uint64_t steps = 0;
      // 64 steps at once while the boundary is out of reach.
      while (true) {
        if (std::abs(k) + 64 < K) {
          k += 2 * std::popcount(rng()) - 64;
          steps += 64;
          continue;
        }
        std::uint64_t bits = rng();
        int j = 0;
        for (; j < 64 && std::abs(k) < K; ++j, bits >>= 1) {
          k += (bits & 1) ? 1 : -1;
          ++steps;
        }
        if (std::abs(k) >= K) break;
      }
      const double tau = static_cast<double>(steps) * delta;
      const double B = k > 0 ? a : -a;
      const double v = N_eval(p + B, t + tau);
      s.tau += tau;
      s.tau2 += tau * tau;
      s.up += k > 0 ? 1.0 : 0.0;
      s.n += v;
      s.n2 += v * v;
    }
    return s;
  });
  Sums tot;
  for (const auto& s : parts) {
    tot.tau += s.tau;
    tot.tau2 += s.tau2;
    tot.up += s.up;
    tot.n += s.n;
    tot.n2 += s.n2;
  }
  const double P = static_cast<double>(paths);
  const double Et = tot.tau / P, se_t = std::sqrt(std::max(0.0, tot.tau2 / P - Et * Et) / P);
  const double fu = tot.up / P, se_u = std::sqrt(0.25 / P);
  const double En = tot.n / P, se_n = std::sqrt(std::max(0.0, tot.n2 / P - En * En) / P);
  const double N0 = N_eval(p, t);
  VerificationReport r;
  r.check_name = "brownian_crosscheck";
  r.gating = false;
  r.seed = seed;
  r.tolerance = tol.get("mc_se_multiplier");
  r.domain = "(p, a, t) = (" + format_double(p) + ", " + format_double(a) + ", " + format_double(t) +
             "), walk step " + format_double(std::sqrt(delta));
  MarginTracker tr;
  tr.observe_at(-std::abs(Et - a * a) / se_t, 0);
  tr.observe_at(-std::abs(fu - 0.5) / se_u, 1);
  tr.observe_at(se_n > 0.0 ? (En - N0) / se_n : (En >= N0 ? INFINITY : -INFINITY), 2);
  tr.into(r);
  r.samples = paths;
  r.metric("E_tau", Et);
  r.metric("E_tau_se", se_t);
  r.metric("a_squared", a * a);
  r.metric("exit_up_fraction", fu);
  r.metric("E_N_exit", En);
  r.metric("E_N_exit_se", se_n);
  r.metric("N_start", N0);
  r.notes.push_back("margins in standard errors; witness 0: E tau vs a^2, 1: exit symmetry, 2: E N(exit) >= N(p, t)");
  r.notes.push_back("random-walk discretization bias is O(step)");
  r.finalize();
  r.elapsed_ms = sw.ms();
  return r;
}

}  // namespace expint
