#pragma once

#include <vector>

namespace expint {

// Nodes and weights for E f(Z), Z ~ N(0,1): sum_i w_i f(z_i) with sum w_i = 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per node count; safe to call concurrently.
const GaussHermiteRule& gauss_hermite(int n);

}  // namespace expint
