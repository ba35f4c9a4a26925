#include "expint/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "expint/errors.hpp"
#include "expint/kernel.hpp"

namespace expint {

namespace {

constexpr double kEps = 2.220446049250313e-16;

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// k-values at tau(u) for the F integrand, with tau(0) = -inf handled.
KernelEval kernel_at_root(double u) { return kernel_eval(inv_k_prime_fast(u)); }

// Hermite error bound h^4/384 max|f''''| per panel, with f'''' estimated from
// second differences of the closed-form f''. Returns the largest
// |error| / max(1, |value|).
double hermite_error_bound(const std::vector<double>& f2, const std::vector<double>& values, double h) {
  const std::size_t n = f2.size();
  std::vector<double> f4(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) f4[i] = std::abs(f2[i - 1] - 2.0 * f2[i] + f2[i + 1]) / (h * h);
  if (n >= 3) {
    f4[0] = f4[1];
    f4[n - 1] = f4[n - 2];
  }
  double worst = 0.0;
  const double c = h * h * h * h / 384.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Safety factor 2 covers the difference-quotient estimate of f''''.
    const double e = 2.0 * c * std::max(f4[i], f4[i + 1]);
    const double scale = std::max(1.0, std::max(std::abs(values[i]), std::abs(values[i + 1])));
    worst = std::max(worst, e / scale);
  }
  // Rounding of the accumulated panel integrals.
  return worst + 64.0 * kEps * std::sqrt(static_cast<double>(n));
}

std::size_t node_count(double lo, double hi, double step) {
  return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

void require_nonneg(double x, const char* fn) {
  if (!(x >= 0.0)) throw DomainError(std::string(fn) + ": argument must be >= 0");
  if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": argument must be finite");
}

void require_positive(double x, const char* fn) {
  if (!(x > 0.0)) throw DomainError(std::string(fn) + ": argument must be > 0");
}

}  // namespace

SpecialFunctionTable build_F_table(double linear_step, double log_step) {
  auto integrand = [](double u) { return std::exp(kernel_at_root(u).k); };

  TableSegment lin;
  lin.lo = 0.0;
  lin.step = linear_step;
  lin.log_space = false;
  const std::size_t n1 = node_count(0.0, kFLogSwitch, linear_step);
  lin.values.resize(n1);
  lin.derivatives.resize(n1);
  std::vector<double> f2(n1);
  CompensatedSum acc;
  lin.values[0] = 0.0;
  lin.derivatives[0] = 0.0;
  f2[0] = 1.0;
  for (std::size_t i = 1; i < n1; ++i) {
    const double a = lin.node(i - 1), b = lin.node(i);
    acc.add(gauss_legendre7_t(integrand, a, b));
    const KernelEval e = kernel_at_root(b);
    lin.values[i] = acc.value();
    lin.derivatives[i] = std::exp(e.k);
    f2[i] = b * std::exp(e.k) / e.k_double_prime;
  }
  lin.error_bound = hermite_error_bound(f2, lin.values, linear_step);

  TableSegment lg;
  lg.lo = kFLogSwitch;
  lg.step = log_step;
  lg.log_space = true;
  const std::size_t n2 = node_count(kFLogSwitch, kFDomainMax, log_step);
  lg.values.resize(n2);
  lg.derivatives.resize(n2);
  std::vector<double> g2(n2);
  CompensatedSum L;
  L.add(std::log(lin.values.back()));
  for (std::size_t i = 0; i < n2; ++i) {
    const double x = lg.node(i);
    if (i > 0) {
      const double Lprev = lg.values[i - 1];
      const double inc = gauss_legendre7_t([&](double u) { return std::exp(kernel_at_root(u).k - Lprev); },
                                           lg.node(i - 1), x);
      L.add(std::log1p(inc));
    }
    const double Li = L.value();
    const KernelEval e = kernel_at_root(x);
    const double ratio = std::exp(e.k - Li);  // F'/F
    lg.values[i] = Li;
    lg.derivatives[i] = ratio;
    g2[i] = ratio * (x / e.k_double_prime - ratio);  // (log F)''
  }
  lg.error_bound = hermite_error_bound(g2, lg.values, log_step);

  std::vector<TableSegment> segs;
  segs.push_back(std::move(lin));
  segs.push_back(std::move(lg));
  return SpecialFunctionTable("F", std::move(segs));
}

SpecialFunctionTable build_G_table(double step) {
  const double lo = std::log(kGTableMin), hi = std::log(kGTableMax);
  const std::size_t panels = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  TableSegment seg;
  seg.lo = lo;
  seg.step = (hi - lo) / static_cast<double>(panels);
  seg.log_space = false;
  const std::size_t n = panels + 1;
  seg.values.resize(n);
  seg.derivatives.resize(n);
  std::vector<double> g2(n);
  // d/du G(e^u) = -k'(-s) e^{k(-s)},  d^2/du^2 = s e^{k(-s)} (k'' + k'^2).
  auto slope = [](double u) {
    const KernelEval e = kernel_eval(-std::exp(u));
    return e.k_prime / e.inv_mills;
  };
  CompensatedSum acc;
  const double top = seg.node(n - 1);
  acc.add(G_asymptotic(std::exp(top)));
  for (std::size_t j = n; j-- > 0;) {
    const double u = seg.node(j);
    if (j + 1 < n) acc.add(gauss_legendre7_t(slope, u, seg.node(j + 1)));
    const double s = std::exp(u);
    const KernelEval e = kernel_eval(-s);
    const double ek = 1.0 / e.inv_mills;
    seg.values[j] = acc.value();
    seg.derivatives[j] = -e.k_prime * ek;
    g2[j] = s * ek * (e.k_double_prime + e.k_prime * e.k_prime);
  }
  seg.error_bound = hermite_error_bound(g2, seg.values, seg.step);
  std::vector<TableSegment> segs;
  segs.push_back(std::move(seg));
  return SpecialFunctionTable("G(log s)", std::move(segs));
}

const SpecialFunctionTable& F_table() {
  static const SpecialFunctionTable table = build_F_table();
  return table;
}

const SpecialFunctionTable& G_table() {
  static const SpecialFunctionTable table = build_G_table();
  return table;
}

double F_eval(double x) {
  require_nonneg(x, "F");
  if (x == 0.0) return 0.0;
  return F_table().eval(x);
}

double log_F_eval(double x) {
  require_nonneg(x, "log_F");
  if (x == 0.0) return -INFINITY;
  return F_table().eval_log(x);
}

double log_F_prime(double x) {
  require_nonneg(x, "log_F_prime");
  if (x == 0.0) return -INFINITY;
  return kernel_at_root(x).k;
}

double F_prime(double x) {
  require_nonneg(x, "F_prime");
  if (x == 0.0) return 0.0;
  const double v = std::exp(kernel_at_root(x).k);
  if (!std::isfinite(v)) throw RangeError("F_prime: value overflows double");
  return v;
}

double F_second(double x) {
  require_nonneg(x, "F_second");
  if (x == 0.0) return 1.0;
  const KernelEval e = kernel_at_root(x);
  const double v = x * std::exp(e.k) / e.k_double_prime;
  if (!std::isfinite(v)) throw RangeError("F_second: value overflows double");
  return v;
}

double M_eval(double x, double y) {
  if (!(x > 0.0)) throw DomainError("M: x must be > 0");
  require_nonneg(y, "M");
  return std::log(x) + F_eval(y / x);
}

double G_asymptotic(double s, int terms) {
  const double z = 1.0 / (s * s);
  double term = 1.0, sum = 0.0, zn = 1.0;
  for (int n = 1; n <= terms; ++n) {
    term = (n == 1) ? 1.0 : term * (2.0 * n - 1.0);  // (2n-1)!!
    zn *= z;
    const double t = term / (2.0 * n) * zn;
    sum += (n % 2 == 1) ? t : -t;
  }
  return sum;
}

double G_eval(double s) {
  require_positive(s, "G");
  if (std::isinf(s)) return 0.0;
  const SpecialFunctionTable& tab = G_table();
  const Interval d = tab.domain();
  const double u = std::log(s);
  if (u > d.hi) return G_asymptotic(s);
  if (u >= d.lo) return tab.eval(u);
  // G(s) = G(s0) + log(s0/s) - int_s^{s0} e^{k(-r)} dr.
  const double s0 = std::exp(d.lo);
  const double inner =
      gauss_legendre7_t([](double r) { return 1.0 / kernel_eval(-r).inv_mills; }, s, s0);
  return tab.segments().front().values.front() + (d.lo - u) - inner;
}

double G_prime(double s) {
  require_positive(s, "G_prime");
  if (std::isinf(s)) return 0.0;
  const KernelEval e = kernel_eval(-s);
  return -e.k_prime / (e.inv_mills * s);
}

double G_second(double s) {
  require_positive(s, "G_second");
  if (std::isinf(s)) return 0.0;
  const KernelEval e = kernel_eval(-s);
  return (e.k_double_prime + e.k_prime * e.k_prime + e.k_prime / s) / (e.inv_mills * s);
}

double G_prime_quadrature(double s, const QuadratureConfig& cfg) {
  require_positive(s, "G_prime_quadrature");
  auto J = [s](double v) {
    const double r = s + v;
    return std::exp(-v * (s + 0.5 * v)) / (r * r);
  };
  // Geometric break points from the smallest natural scale (s or 1/s) out to 16,
  // so the adaptive rule cannot step over the peak at v = 0.
  std::vector<double> cuts = {0.0};
  for (double c = std::min(s, 1.0 / s); c < 16.0; c *= 4.0) cuts.push_back(c);
  cuts.push_back(16.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(J, cuts[i], cuts[i + 1], cfg).value;
  total += integrate_to_inf(J, cuts.back(), cfg).value;
  return -total;
}

double G_eval_direct(double s, const QuadratureConfig& cfg) {
  require_positive(s, "G_eval_direct");
  QuadratureConfig inner = cfg;
  inner.rel_tol = std::min(cfg.rel_tol, 1e-12);
  auto J = [&](double r) { return -G_prime_quadrature(r, inner); };
  double total = 0.0;
  double a = s;
  for (double b : {2.0 * s, 8.0 * s + 1.0})
    if (b > a) {
      total += integrate(J, a, b, cfg).value;
      a = b;
    }
  total += integrate_to_inf(J, a, cfg).value;
  return total;
}

double N_eval(double p, double t) {
  require_positive(p, "N");
  require_nonneg(t, "N");
  if (t == 0.0) return std::log(p);
  return std::log(p) + G_eval(p / std::sqrt(t));
}

double N_t(double p, double t) {
  require_positive(p, "N_t");
  require_positive(t, "N_t");
  const double s = p / std::sqrt(t);
  return -s * G_prime(s) / (2.0 * t);
}

double N_tt(double p, double t) {
  require_positive(p, "N_tt");
  require_positive(t, "N_tt");
  const double s = p / std::sqrt(t);
  return (s * s * G_second(s) + 3.0 * s * G_prime(s)) / (4.0 * t * t);
}

double N_p(double p, double t) {
  require_positive(p, "N_p");
  require_positive(t, "N_p");
  return 1.0 / p + G_prime(p / std::sqrt(t)) / std::sqrt(t);
}

double N_pp(double p, double t) {
  require_positive(p, "N_pp");
  require_positive(t, "N_pp");
  return -1.0 / (p * p) + G_second(p / std::sqrt(t)) / t;
}

double N_sup_eval(double p, double t) {
  require_positive(p, "N_sup");
  require_nonneg(t, "N_sup");
  if (t == 0.0) return std::log(p);
  return std::log(p) + 0.5 * std::log1p(t / (p * p));
}

double N_sup_tt(double p, double t) {
  require_positive(p, "N_sup_tt");
  require_nonneg(t, "N_sup_tt");
  const double q = p * p + t;
  return -0.5 / (q * q);
}

double N_sup_residual(double p, double t) {
  require_positive(p, "N_sup_residual");
  require_nonneg(t, "N_sup_residual");
  const double q = p * p + t;
  return t / (q * q);
}

double N_sup_residual_alt(double p, double t) {
  require_positive(p, "N_sup_residual_alt");
  require_nonneg(t, "N_sup_residual_alt");
  const double q = p * p + t;
  return (t + t * t) / (2.0 * q * q);
}

double log_bound_rhs(double x, double R, double constant) {
  require_nonneg(x, "bound_rhs");
  if (!(R > 0.0)) throw DomainError("bound_rhs: R must be > 0");
  return std::log(constant) + x * x / (2.0 * R) - std::log1p(x / std::sqrt(R));
}

double bound_rhs(double x, double R) {
  require_nonneg(x, "bound_rhs");
  if (!(R > 0.0)) throw DomainError("bound_rhs: R must be > 0");
  const double v = 10.0 * std::exp(x * x / (2.0 * R)) / (1.0 + x / std::sqrt(R));
  if (!std::isfinite(v)) throw RangeError("bound_rhs: value overflows double; use the log form");
  return v;
}

}  // namespace expint
