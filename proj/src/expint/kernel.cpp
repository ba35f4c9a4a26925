#include "expint/kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "expint/errors.hpp"

namespace expint {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
constexpr double kSqrt2 = 1.41421356237309504880168872420970;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr long double kPiL = 3.14159265358979323846264338327950288L;

void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": argument must be finite");
}

// T2 = 2/(w + 3/(w + 4/(w + ...))) by the modified Lentz method.
template <class Real>
Real lentz_t2(Real w) {
  const Real tiny = std::numeric_limits<Real>::min() * 16;
  const Real eps = std::numeric_limits<Real>::epsilon();
  Real f = tiny, c = f, d = 0;
  for (int j = 2; j < 5000; ++j) {
    const Real a = static_cast<Real>(j);
    d = w + a * d;
    if (d == 0) d = tiny;
    c = w + a / c;
    if (c == 0) c = tiny;
    d = 1 / d;
    const Real delta = c * d;
    f *= delta;
    if (std::abs(delta - 1) < eps) break;
  }
  return f;
}

// e^{-x^2/2} with the rounding error of x*x folded back in.
double exp_half_square(double x) {
  const double sq = x * x;
  const double lo = std::fma(x, x, -sq);
  return std::exp(-0.5 * sq) * (1.0 - 0.5 * lo);
}

// log Phi(x) for x >= kContinuedFractionSwitch.
double log_cdf_direct(double x) {
  if (x < 0.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
  return std::log1p(-0.5 * std::erfc(x / kSqrt2));
}

double cdf_direct(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

}  // namespace

double inv_mills(double x) {
  require_finite(x, "inv_mills");
  if (x < kContinuedFractionSwitch) {
    const double w = -x;
    const double t2 = lentz_t2(w);
    return w + 1.0 / (w + t2);
  }
  return kInvSqrt2Pi * exp_half_square(x) / cdf_direct(x);
}

KernelEval kernel_eval(double x) {
  require_finite(x, "kernel_eval");
  KernelEval r;
  r.x = x;
  if (x < kContinuedFractionSwitch) {
    // m = w + T1, k' = T1, k'' = T1 (T2 - T1) with T1 = 1/(w + T2).
    const double w = -x;
    const double t2 = lentz_t2(w);
    const double t1 = 1.0 / (w + t2);
    r.inv_mills = w + t1;
    r.k = -std::log(r.inv_mills);
    r.k_prime = t1;
    r.k_double_prime = t1 * (t2 - t1);
    return r;
  }
  r.k = 0.5 * x * x + kLogSqrt2Pi + log_cdf_direct(x);
  r.inv_mills = kInvSqrt2Pi * exp_half_square(x) / cdf_direct(x);
  r.k_prime = x + r.inv_mills;
  r.k_double_prime = 1.0 - r.k_prime * r.inv_mills;
  return r;
}

double inv_mills_asymptotic(double x) {
  require_finite(x, "inv_mills_asymptotic");
  const double ix = 1.0 / x;
  return -x - ix + 2.0 * ix * ix * ix;
}

namespace {

void require_positive_u(double u) {
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("inv_k_prime: argument must be positive and finite");
}

}  // namespace

double inv_k_prime(double u) {
  require_positive_u(u);
  // k'(t) > t and k'(t) < -1/t for t < 0 give the bracket.
  double lo = -1.0 / u, hi = u;
  while (hi - lo > 1e-13 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (kernel_eval(mid).k_prime < u)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  const KernelEval e = kernel_eval(t);
  const double step = (e.k_prime - u) / e.k_double_prime;
  if (std::isfinite(step)) t -= step;
  return t;
}

double inv_k_prime_fast(double u) {
  require_positive_u(u);
  double lo = -1.0 / u, hi = u;
  // Seed from the asymptotics: t ~ -1/u for small u, t ~ u for large u.
  double t = u < 0.5 ? -1.0 / u + 2.0 * u : (u > 3.0 ? u - 1.0 / u : 0.0);
  t = std::min(std::max(t, lo), hi);
  for (int it = 0; it < 200; ++it) {
    const KernelEval e = kernel_eval(t);
    const double g = e.k_prime - u;
    if (g < 0.0)
      lo = t;
    else if (g > 0.0)
      hi = t;
    else
      return t;
    double next = t - g / e.k_double_prime;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4e-16 * std::max(1.0, std::abs(t))) return next;
    t = next;
  }
  return t;
}

Auxiliaries auxiliaries(double x) {
  require_finite(x, "auxiliaries");
  using LD = long double;
  LD q;
  const LD X = x;
  if (x < kContinuedFractionSwitch) {
    const LD w = -X;
    const LD t2 = lentz_t2<LD>(w);
    q = 1.0L / (w + 1.0L / (w + t2));
  } else if (x > 0.0) {
    // Divide through by q^2 (resp. q) so large x cannot overflow.
    const LD cdf = 0.5L * std::erfc(-X / std::sqrt(2.0L));
    const LD r = std::exp(-0.5L * X * X) / (std::sqrt(2.0L * kPiL) * cdf);
    Auxiliaries a;
    a.u_scaled = 1.0L - X * r - r * r;
    a.v_scaled = 1.0L + X * r / (1.0L + X * X);
    return a;
  } else {
    // q = Phi / phi = sqrt(2 pi) e^{x^2/2} Phi(x).
    const LD cdf = 0.5L * std::erfc(-X / std::sqrt(2.0L));
    q = std::sqrt(2.0L * kPiL) * std::exp(0.5L * X * X) * cdf;
  }
  Auxiliaries a;
  a.u_scaled = q * q - X * q - 1.0L;
  a.v_scaled = q + X / (1.0L + X * X);
  return a;
}

}  // namespace expint
