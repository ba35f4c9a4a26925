#pragma once

#include "expint/hermite_table.hpp"
#include "expint/quadrature.hpp"

namespace expint {

// F(x) = int_0^x exp(k((k')^{-1}(u))) du, tabulated on [0, 40]: linear values
// on [0, 6], log F beyond.
inline constexpr double kFDomainMax = 40.0;
inline constexpr double kFLogSwitch = 6.0;

// G(s) = int_s^inf int_r^inf u^{-2} e^{(r^2 - u^2)/2} du dr, tabulated in
// log s on [1e-3, 60]; asymptotic series above, quadrature below.
inline constexpr double kGTableMin = 1e-3;
inline constexpr double kGTableMax = 60.0;

// Tables are built on first use (thread-safe) and immutable afterwards.
const SpecialFunctionTable& F_table();
const SpecialFunctionTable& G_table();

SpecialFunctionTable build_F_table(double linear_step = 1e-3, double log_step = 5e-3);
SpecialFunctionTable build_G_table(double step = 1e-3);

double F_eval(double x);
double log_F_eval(double x);
// Closed forms at tau = (k')^{-1}(x): F' = e^{k(tau)}, F'' = k'(tau) e^{k(tau)} / k''(tau).
double F_prime(double x);
double F_second(double x);
// log F'(x) = k(tau); finite for every x >= 0 apart from x = 0.
double log_F_prime(double x);

double M_eval(double x, double y);

double G_eval(double s);
// G' = -k'(-s) e^{k(-s)} / s,  G'' = e^{k(-s)} (k'' + k'^2 + k'/s) / s at -s.
double G_prime(double s);
double G_second(double s);
// Independent route: G'(s) = -J(s), J(s) = int_0^inf (s+v)^{-2} e^{-s v - v^2/2} dv.
double G_prime_quadrature(double s, const QuadratureConfig& cfg = {});
// G(s) = int_s^inf J(r) dr by nested adaptive quadrature (slow; tests only).
double G_eval_direct(double s, const QuadratureConfig& cfg = {});
// Alternating asymptotic series sum_n (-1)^{n+1} (2n-1)!!/(2n) s^{-2n}.
double G_asymptotic(double s, int terms = 8);

double N_eval(double p, double t);
double N_t(double p, double t);
double N_tt(double p, double t);
double N_p(double p, double t);
double N_pp(double p, double t);

double N_sup_eval(double p, double t);
double N_sup_tt(double p, double t);
// N^sup_pp / 2 + N^sup_t from direct differentiation: t / (p^2 + t)^2.
double N_sup_residual(double p, double t);
// Alternative residual expression (t + t^2) / (2 (p^2 + t)^2), kept for comparison.
double N_sup_residual_alt(double p, double t);

// 10 e^{x^2/(2R)} (1 + x/sqrt(R))^{-1} and its logarithm.
double bound_rhs(double x, double R);
double log_bound_rhs(double x, double R, double constant = 10.0);

}  // namespace expint
