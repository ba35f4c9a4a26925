#pragma once

#include <cstdint>
#include <vector>

#include "expint/martingale.hpp"
#include "expint/report.hpp"

namespace expint {

// Exact expectations over the 2^N equally weighted leaves of lambda * xi.
struct MartingaleSummary {
  double lhs = 0.0;           // log E xi - E log xi
  double rhs_G = 0.0;         // E G(xi / [xi]^{1/2}), G(inf) = 0
  double rhs_log = 0.0;       // E log(1 + [xi] / xi^2)
};
MartingaleSummary summarize(const DyadicMartingale& m, double lambda = 1.0);

VerificationReport check_theorem_martingale(const DyadicMartingale& m, const Tolerances& tol);
// Factor 1 and factor 1/2 versions; the margin is the smaller of the two.
VerificationReport check_log_bounds(const DyadicMartingale& m, const Tolerances& tol);

enum class BellmanKind { N, N_sup };
// One step per internal node: mean of N over the two children (with the
// incremented variation) minus N at the node; then the chain
// E N(xi_n, [xi]_n), n = 0..N, must be nondecreasing.
VerificationReport bellman_induction_check(const DyadicMartingale& m, BellmanKind which, const Tolerances& tol);
// Parent = mean of children, E xi_n constant, E [xi] = E xi_N^2 - xi_0^2.
VerificationReport check_tree_identities(const DyadicMartingale& m, const Tolerances& tol);
// Main-bound and log-bound margins after multiplying every leaf by lambda.
VerificationReport check_scale_invariance(const DyadicMartingale& m, double lambda, const Tolerances& tol);

struct MartingaleBatchOptions {
  std::uint64_t count = 10000;
  int max_depth = 10;
  std::uint64_t seed = 42;
  int jobs = 1;
};
// Random trees (depth uniform in [0, max_depth], laws alternating) or an
// explicit manifest; every check above aggregated over the batch.
std::vector<VerificationReport> run_martingale_batch(const MartingaleBatchOptions& opt, const Tolerances& tol);
std::vector<VerificationReport> run_martingale_manifest(const std::vector<ManifestEntry>& entries, int jobs,
                                                        const Tolerances& tol);

// Symmetric +-sqrt(delta) walk, delta = (step_fraction a)^2, run until it
// leaves (-a, a). Informational: E tau vs a^2, exit symmetry and
// E N(p + B_tau, t + tau) >= N(p, t), all in standard errors.
VerificationReport brownian_crosscheck(double p, double a, double t, std::uint64_t paths, std::uint64_t seed,
                                       int jobs, const Tolerances& tol, double step_fraction = 1e-3);

}  // namespace expint
