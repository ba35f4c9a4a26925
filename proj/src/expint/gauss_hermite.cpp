#include "expint/gauss_hermite.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace expint {

namespace {

// Nodes are the eigenvalues of the Jacobi matrix (zero diagonal, off-diagonal
// sqrt(j)), located by Sturm-sequence bisection. Weights are 1 / sum_j psi_j(x)^2
// over the orthonormal polynomials, accumulated with rescaling so that large
// nodes do not overflow.
int count_below(int n, double x) {
  int count = 0;
  double d = -x;
  if (d < 0.0) ++count;
  for (int k = 1; k < n; ++k) {
    if (d == 0.0) d = -1e-300;
    d = -x - k / d;
    if (d < 0.0) ++count;
  }
  return count;
}

double weight_at(int n, double x) {
  double p0 = 1.0, p1 = x, sum = 1.0 + x * x, log_scale = 0.0;
  for (int j = 1; j + 1 < n; ++j) {
    const double p2 = (x * p1 - std::sqrt(static_cast<double>(j)) * p0) / std::sqrt(j + 1.0);
    p0 = p1;
    p1 = p2;
    sum += p2 * p2;
    if (std::abs(p1) > 1e100) {
      p0 *= 1e-100;
      p1 *= 1e-100;
      sum *= 1e-200;
      log_scale += 200.0 * std::log(10.0);
    }
  }
  return std::exp(-log_scale - std::log(sum));
}

GaussHermiteRule build(int n) {
  GaussHermiteRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double bound = std::sqrt(4.0 * n + 2.0);
  for (int i = n / 2; i < n; ++i) {
    // The i-th smallest eigenvalue (0-based) is the point where count_below reaches i + 1.
    double lo = (i == n / 2) ? -1e-3 : r.nodes[i - 1], hi = bound;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (count_below(n, mid) > i)
        hi = mid;
      else
        lo = mid;
    }
    r.nodes[i] = 0.5 * (lo + hi);
  }
  if (n % 2) r.nodes[n / 2] = 0.0;
  for (int i = 0; i < n / 2; ++i) r.nodes[i] = -r.nodes[n - 1 - i];
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += (r.weights[i] = weight_at(n, r.nodes[i]));
  for (double& v : r.weights) v /= total;
  return r;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  if (n < 2 || n > 512) throw std::invalid_argument("gauss_hermite: node count must be in [2, 512]");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build(n));
  return *slot;
}

}  // namespace expint
