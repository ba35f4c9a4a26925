#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "expint/report.hpp"
#include "expint/test_function.hpp"

namespace expint {

// U_s g(y) = E g(y + sqrt(s) Z) by Gauss-Hermite with `nodes` points.
double heat_apply_1d(const std::function<double(double)>& g, double s, double y, int nodes);
double heat_apply_1d(const TestFunction& g, double s, double y, int nodes);

struct FlowValue {
  double value = 0.0;
  double error = 0.0;
};

// A(s) = U_s[ log U_{1-s} g + F( sqrt(s) |U_{1-s} g'| / U_{1-s} g ) ](0).
// Inner semigroup by Gauss-Hermite with `nodes` points, outer expectation by
// adaptive Gauss-Kronrod; the error is |A_n - A_{n/2}| plus the outer estimate.
FlowValue flow_value(const PositiveFunction& g, double s, int nodes = 128);

enum class FlowMethod { quadrature_1d, monte_carlo_nd };

struct FlowTrace {
  std::vector<double> s_grid;
  std::vector<double> values;
  std::vector<double> error_bars;
  FlowMethod method = FlowMethod::quadrature_1d;

  // s<TAB>A(s)<TAB>err rows.
  std::string to_text() const;
};

std::pair<FlowTrace, VerificationReport> check_flow_monotone(const PositiveFunction& g, int s_points, int nodes,
                                                             const Tolerances& tol);

// Chain log E e^{f - E f} <= E F(|f'|/sqrt(R)) <= 10 E e^{f'^2/(2R)} (1 + |f'|/sqrt(R))^{-1}
// for X ~ N(0, 1/R), by adaptive quadrature in 1-D.
struct EndpointValues {
  double lhs = 0.0, mid = 0.0, rhs = 0.0, error = 0.0;
};
EndpointValues endpoint_values(const TestFunction& f, double R);
VerificationReport check_endpoint_inequality(const TestFunction& f, double R, const Tolerances& tol);

// Monte Carlo version in n dimensions with delta-method standard errors.
VerificationReport mc_endpoint_nd(const TestFunction& f, int n, std::uint64_t samples, std::uint64_t seed,
                                  int jobs, const Tolerances& tol);

struct SharpnessRow {
  double R = 0.0, lhs = 0.0, rhs = 0.0;
};
struct SharpnessTable {
  double c = 0.0;
  std::vector<SharpnessRow> rows;
  double rhs_uncut = 0.0;  // E e^{X^2/2} (1+|X|)^{-c} without a cutoff: 2 / ((c-1) sqrt(2 pi))

  std::string to_text() const;
};
// f_R = clipped_quadratic(R); lhs = log E e^{f_R}, rhs = E e^{f_R'^2/2} (1 + |f_R'|)^{-c}.
SharpnessTable sharpness_demo(double c, const std::vector<double>& R_cutoffs);
// Reports: lhs strictly increasing (gating) and rhs relative change over the
// last step within `sharpness_rhs` (see the notes for why this is not gating).
std::vector<VerificationReport> check_sharpness(const SharpnessTable& t, const Tolerances& tol);

}  // namespace expint
