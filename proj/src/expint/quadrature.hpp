#pragma once

#include <functional>

namespace expint {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 200;
  int hermite_nodes = 64;

  // Throws std::invalid_argument when a field violates its constraint.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15) on a finite interval.
QuadResult integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg = {});

// Integral over [a, inf) via the map x = a + v/(1-v).
QuadResult integrate_to_inf(const Integrand& f, double a, const QuadratureConfig& cfg = {});

// Fixed 7-point Gauss-Legendre rule on [a, b].
double gauss_legendre7(const Integrand& f, double a, double b);

template <class Fn>
double gauss_legendre7_t(Fn&& f, double a, double b) {
  static constexpr double x[4] = {0.0, 0.4058451513773971669066064, 0.7415311855993944398638648,
                                  0.9491079123427585245261897};
  static constexpr double w[4] = {0.4179591836734693877551020, 0.3818300505051189449503698,
                                  0.2797053914892766679014678, 0.1294849661688696932706114};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = w[0] * f(c);
  for (int i = 1; i < 4; ++i) s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  return s * h;
}

}  // namespace expint
