#include "expint/kernel_checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "expint/kernel.hpp"
#include "expint/quadrature.hpp"
#include "expint/special_functions.hpp"

namespace expint {

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
};

double lin(double lo, double hi, int i, int n) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
double logspace(double lo, double hi, int i, int n) {
  return n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
}

VerificationReport finish(const char* name, double tolerance, const std::string& domain, const MarginTracker& tr,
                          const Stopwatch& sw) {
  VerificationReport r;
  r.check_name = name;
  r.tolerance = tolerance;
  r.domain = domain;
  tr.into(r);
  r.finalize();
  r.elapsed_ms = sw.ms();
  return r;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

VerificationReport check_kernel_positivity(int points, double lo, double hi, const Tolerances&) {
  Stopwatch sw;
  MarginTracker tr;
  // Sign checks: the margin is the smallest of k', k'' and the scaled u, v.
  for (int i = 0; i < points; ++i) {
    const double x = lin(lo, hi, i, points);
    const KernelEval e = kernel_eval(x);
    const Auxiliaries a = auxiliaries(x);
    const double m = std::min({e.k_prime, e.k_double_prime, static_cast<double>(a.u_scaled),
                               static_cast<double>(a.v_scaled)});
    tr.observe_at(m > 0.0 ? m : (m == 0.0 ? -1.0 : m), x);
  }
  auto r = finish("kernel_positivity", 0.0,
                  std::to_string(points) + " points of [" + format_double(lo) + ", " + format_double(hi) + "]", tr, sw);
  r.notes.push_back("strict positivity: a zero value is reported as margin -1");
  return r;
}

VerificationReport check_kernel_roundtrip(int points, const Tolerances& tol) {
  Stopwatch sw;
  MarginTracker tr;
  for (int i = 0; i < points; ++i) {
    const double u = logspace(1e-6, 1e3, i, points);
    const double x = inv_k_prime(u);
    tr.observe_at(-std::abs(kernel_eval(x).k_prime - u) / std::max(1.0, u), u);
  }
  return finish("kernel_roundtrip", tol.get("kernel_roundtrip"), "u log-spaced in [1e-6, 1e3]", tr, sw);
}

std::vector<VerificationReport> check_F_boundary(const Tolerances& tol) {
  Stopwatch sw;
  const auto& T = F_table();
  // Table nodes sit at multiples of 1e-3, so the stencil reads stored values.
  const double h = 1e-3;
  const double f0 = T.eval(0.0), f1 = T.eval(h), f2 = T.eval(2 * h), f3 = T.eval(3 * h);
  // Second-order one-sided differences.
  const double d1 = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
  const double d2 = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
  std::vector<VerificationReport> out;
  auto one = [&](const char* name, const char* tname, double margin, double value) {
    VerificationReport r;
    r.check_name = name;
    r.tolerance = tol.get(tname);
    r.domain = "x = 0, one-sided step " + format_double(h);
    r.samples = 1;
    r.min_margin = margin;
    r.worst_witness = {0.0};
    r.metric("value", value);
    r.finalize();
    r.elapsed_ms = sw.ms();
    out.push_back(r);
  };
  one("F_boundary_value", "F_boundary_value", -std::abs(f0), f0);
  one("F_boundary_slope", "F_boundary_slope", -std::abs(d1), d1);
  one("F_boundary_curvature", "F_boundary_curvature", -std::abs(d2 - 1.0), d2);
  return out;
}

VerificationReport check_F_consistency(int points, const Tolerances& tol) {
  Stopwatch sw;
  MarginTracker tr;
  for (int i = 0; i < points; ++i) {
    const double x = logspace(0.01, 10.0, i, points);
    const double h = 1e-4 * std::min(1.0, x);
    // Differences of log F keep the large-x end in range.
    const double dlog = (log_F_eval(x + h) - log_F_eval(x - h)) / (2.0 * h);
    const double fd = dlog * F_eval(x);
    const double closed = std::exp(kernel_eval(inv_k_prime(x)).k);
    tr.observe_at(-rel(fd, closed), x);
  }
  return finish("F_consistency", tol.get("F_consistency"), "x log-spaced in [0.01, 10], central differences", tr, sw);
}

VerificationReport check_F_identities(int points, const Tolerances& tol) {
  Stopwatch sw;
  MarginTracker tr;
  const auto& T = F_table();
  for (int i = 0; i < points; ++i) {
    const double t = lin(-8.0, 8.0, i, points);
    const KernelEval e = kernel_eval(t);
    const double ek = std::exp(e.k);
    // F' from the interpolating table, F'' from the closed form through the inverse.
    tr.observe_at(-rel(T.eval_derivative(e.k_prime), ek), 0, t);
    tr.observe_at(-rel(F_second(e.k_prime), e.k_prime * ek / e.k_double_prime), 1, t);
  }
  auto r = finish("F_identities", tol.get("F_identity"), "t in [-8, 8]", tr, sw);
  r.notes.push_back("witness (0, t): F'(k'(t)) = e^k; (1, t): F''(k'(t)) = k' e^k / k''");
  return r;
}

VerificationReport check_G_derivative(int points, const Tolerances& tol) {
  Stopwatch sw;
  MarginTracker tr;
  for (int i = 0; i < points; ++i) {
    const double s = logspace(0.05, 20.0, i, points);
    const double h = 1e-4 * s;
    const double fd = (G_eval(s + h) - G_eval(s - h)) / (2.0 * h);
    tr.observe_at(-rel(fd, G_prime(s)), s);
  }
  return finish("G_derivative", tol.get("G_derivative"), "s log-spaced in [0.05, 20], central differences", tr, sw);
}

VerificationReport check_F_bound_chain(int points, const Tolerances& tol) {
  Stopwatch sw;
  MarginTracker tr;
  QuadratureConfig q;
  q.abs_tol = 1e-15;
  q.rel_tol = 1e-13;
  for (int i = 0; i < points; ++i) {
    const double x = lin(0.0, 10.0, i, points);
    const double D = x == 0.0 ? 0.0 : integrate([x](double u) { return std::exp(0.5 * (u - x) * (u + x)); }, 0.0, x, q).value;
    const double A = 2.0 * x / (1.0 + x * x), B = 3.0 / (1.0 + x);
    tr.observe_at(A - D, 0, x);
    tr.observe_at(B - A, 1, x);
  }
  auto r = finish("F_bound_chain", tol.get("F_bound"), "x in [0, 10], all terms times e^{-x^2/2}", tr, sw);
  r.notes.push_back("witness (0, x): first inequality; (1, x): second");
  return r;
}

VerificationReport check_monotonicity(int points) {
  Stopwatch sw;
  MarginTracker tr;
  double prev = log_F_eval(40.0 / points);
  for (int i = 2; i <= points; ++i) {
    const double x = 40.0 * i / points, v = log_F_eval(x);
    tr.observe_at(v - prev, 0, x);
    prev = v;
  }
  prev = G_eval(1e-3);
  for (int i = 1; i < points; ++i) {
    const double s = logspace(1e-3, 1e3, i, points), v = G_eval(s);
    tr.observe_at(prev - v, 1, s);
    prev = v;
  }
  auto r = finish("monotonicity", 0.0, "log F on (0, 40], G on [1e-3, 1e3]", tr, sw);
  if (r.min_margin <= 0.0) {
    r.passed = false;
    r.notes.push_back("a zero step violates strict monotonicity");
  }
  r.notes.push_back("witness (0, x): log F step ending at x; (1, s): G step ending at s");
  return r;
}

}  // namespace expint
