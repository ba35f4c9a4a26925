#pragma once

#include <cstdint>
#include <vector>

#include "expint/report.hpp"

namespace expint {

// A(x,y) = [[M_xx + M_y/y, M_xy], [M_xy, M_yy]] for M = log x + F(y/x).
// Entries are stored divided by e^{log_scale}, where
// log_scale = -2 log x + max(0, k(tau)), because F' = e^{k(tau)} overflows
// long before y/x reaches the scan range. det and min_eigenvalue belong to
// the stored (scaled) matrix; their signs and ratios are scale-free.
struct BellmanMatrix {
  double x = 0.0, y = 0.0;
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;
  double det = 0.0;
  double min_eigenvalue = 0.0;
  double log_scale = 0.0;

  double norm() const;  // Frobenius norm of the stored matrix
  double det_ratio() const { return std::abs(det) / (norm() * norm()); }
};

// Scaled 2x2 assembly from t-derivatives (F' and F'' already divided by the
// common scale S, with inv_scale = 1/S multiplying the constant -1).
BellmanMatrix assemble_bellman(double x, double y, double t, double fp, double fpp, double inv_scale,
                               double log_scale);

BellmanMatrix bellman_matrix(double x, double y);

// Candidate M(x,y) = log x + C e^{t^2/2} / (1 + t), t = y/x.
BellmanMatrix candidate_matrix(double C, double x, double y);

struct CheckContext {
  Tolerances tol;
  int jobs = 1;
  std::uint64_t seed = 42;
};

std::vector<VerificationReport> check_det_and_psd(const ScanDomain& domain, const CheckContext& ctx);
std::vector<VerificationReport> check_F_bound(const ScanDomain& domain, const CheckContext& ctx);
VerificationReport check_G_sandwich(const ScanDomain& domain, const CheckContext& ctx);
// Finite-difference residual N_pp/2 + N_t over a (p, t) domain.
VerificationReport check_backward_heat(const ScanDomain& domain, const CheckContext& ctx);
// Closed-form residual -1 + s^2 G'' - s^3 G' over an s domain.
VerificationReport check_heat_closed_form(const ScanDomain& domain, const CheckContext& ctx);
VerificationReport check_N_t_concavity(const ScanDomain& domain, const CheckContext& ctx);
VerificationReport check_four_point_N(std::uint64_t count, std::uint64_t seed, const CheckContext& ctx);
VerificationReport check_taylor_limit(double p, double t, const CheckContext& ctx);
std::vector<VerificationReport> check_supersolution(const ScanDomain& domain, std::uint64_t count,
                                                    std::uint64_t seed, const CheckContext& ctx);
VerificationReport scan_counterexample_M_sup(const std::vector<double>& C_grid, const ScanDomain& domain,
                                             const CheckContext& ctx);
// Exploratory; never gating. With b_zero the b coordinate is fixed at 0.
VerificationReport scan_four_point_M(std::uint64_t count, std::uint64_t seed, bool b_zero, const CheckContext& ctx);

// Margins of individual samples, exposed for tests and the Bellman induction.
double four_point_margin_N(double p, double a, double t);
double four_point_margin_N_sup(double p, double a, double t);
double four_point_margin_M(double x, double y, double a, double b);

}  // namespace expint
