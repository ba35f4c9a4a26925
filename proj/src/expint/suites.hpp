#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "expint/report.hpp"

namespace expint {

struct SuiteOptions {
  std::uint64_t seed = 42;
  // Overrides the main random sample count of a suite (four-point samples,
  // Monte Carlo draws, number of trees, exploratory samples).
  std::optional<std::uint64_t> samples;
  int nodes = 128;   // Gauss-Hermite nodes for the inner semigroup
  int depth = 10;    // maximum martingale depth
  int jobs = 1;
  std::uint64_t brownian_paths = 20000;
  Tolerances tol;
};

struct SuiteResult {
  std::string suite;
  std::vector<VerificationReport> reports;
  // Plot-ready text: (file stem, contents).
  std::vector<std::pair<std::string, std::string>> exports;

  // Conjunction over gating reports only.
  bool passed() const;
};

const std::vector<std::string>& suite_names();  // kernel, verify, flow, martingale, scan, all
bool is_suite(const std::string& name);
// Throws std::invalid_argument for an unknown suite.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt);

// Pieces used by the suites, exposed for targeted runs.
std::vector<double> counterexample_C_grid();
std::vector<std::pair<double, double>> taylor_points(std::uint64_t seed);

}  // namespace expint
