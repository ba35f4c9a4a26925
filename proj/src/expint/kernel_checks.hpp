#pragma once

#include <vector>

#include "expint/report.hpp"

namespace expint {

// k' > 0, k'' > 0 and the auxiliaries u, v > 0 on `points` grid points of [lo, hi].
VerificationReport check_kernel_positivity(int points, double lo, double hi, const Tolerances& tol);
// |k'(inv_k_prime(u)) - u| / max(1, u) for u log-spaced in [1e-6, 1e3].
VerificationReport check_kernel_roundtrip(int points, const Tolerances& tol);
// F(0), F'(0), F''(0) from the table by one-sided differences (F lives on x >= 0).
std::vector<VerificationReport> check_F_boundary(const Tolerances& tol);
// Central difference of F against e^{k((k')^{-1}(x))} on [0.01, 10], relative.
VerificationReport check_F_consistency(int points, const Tolerances& tol);
// F'(k'(t)) = e^{k(t)} and F''(k'(t)) = k'(t) e^{k(t)} / k''(t) for t in [-8, 8], relative.
VerificationReport check_F_identities(int points, const Tolerances& tol);
// Central difference of G against the closed-form G' on [0.05, 20], relative.
VerificationReport check_G_derivative(int points, const Tolerances& tol);
// int_0^x e^{u^2/2} du <= 2x/(1+x^2) e^{x^2/2} <= 3/(1+x) e^{x^2/2} on [0, 10], scaled by e^{-x^2/2}.
VerificationReport check_F_bound_chain(int points, const Tolerances& tol);
// F strictly increasing on (0, 40] (in log space), G strictly decreasing on [1e-3, 1e3].
VerificationReport check_monotonicity(int points);

}  // namespace expint
