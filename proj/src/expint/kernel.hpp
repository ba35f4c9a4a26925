#pragma once

namespace expint {

// k(x) = x^2/2 + log(sqrt(2 pi) Phi(x)) and its first two derivatives.
struct KernelEval {
  double x = 0.0;
  double k = 0.0;
  double k_prime = 0.0;
  double k_double_prime = 0.0;
  double inv_mills = 0.0;  // e^{-k(x)} = phi(x) / Phi(x)
};

// Below this point the continued fraction for the Mills ratio is used.
inline constexpr double kContinuedFractionSwitch = -3.0;

double inv_mills(double x);
KernelEval kernel_eval(double x);

// Root t of k'(t) = u: bisection on [-1/u, u] down to 1e-13 relative width,
// then one Newton step.
double inv_k_prime(double u);

// Same root by safeguarded Newton inside the same bracket; used for table
// construction where millions of roots are needed.
double inv_k_prime_fast(double u);

// Scaled auxiliaries from the positivity proof, evaluated in extended
// precision. With h = e^{-x^2/2}, H = int_{-inf}^x h and q = H/h:
//   u / h^2 = q^2 - x q - 1,   v / h = q + x / (1 + x^2).
// For x > 0 these are further divided by q^2 and q. Only the signs matter.
struct Auxiliaries {
  long double u_scaled = 0.0L;
  long double v_scaled = 0.0L;
};
Auxiliaries auxiliaries(double x);

// Three-term asymptotic e^{-k(x)} ~ -x - 1/x + 2/x^3 for x -> -inf.
double inv_mills_asymptotic(double x);

}  // namespace expint
