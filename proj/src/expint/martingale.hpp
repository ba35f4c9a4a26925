#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace expint {

enum class LeafLaw { lognormal_leaves, bounded_ratio };

const char* law_name(LeafLaw law);
LeafLaw parse_law(const std::string& name);

constexpr int kMaxMartingaleDepth = 16;

// Simple positive dyadic martingale. levels[n] holds the 2^n values of xi_n on
// the level-n dyadic atoms; every value is the exact mean of its two children.
// Leaves are rounded to a common binary grid so that the averages are exact.
class DyadicMartingale {
 public:
  static DyadicMartingale from_leaves(std::vector<double> leaves);
  static DyadicMartingale random(int depth, std::uint64_t seed, LeafLaw law);

  int depth() const { return depth_; }
  const std::vector<double>& leaves() const { return levels_.back(); }
  const std::vector<double>& level(int n) const { return levels_.at(static_cast<std::size_t>(n)); }
  double value(int n, std::size_t atom) const { return levels_.at(static_cast<std::size_t>(n)).at(atom); }

  // "depth\n" followed by one leaf per line at 17 significant digits.
  std::string serialize() const;
  static DyadicMartingale parse(const std::string& text);

 private:
  explicit DyadicMartingale(std::vector<std::vector<double>> levels);
  int depth_ = 0;
  std::vector<std::vector<double>> levels_;
};

// Per-leaf [xi] = sum_{n=1}^{N} (xi_n - xi_{n-1})^2 (d_0 = 0).
struct QuadraticVariationField {
  std::vector<double> values;
};
QuadraticVariationField quadratic_variation(const DyadicMartingale& m);
// [xi]_n per atom of level n: the partial sums up to level n, which are F_n-measurable.
std::vector<std::vector<double>> partial_variation(const DyadicMartingale& m);

// Batch manifest: one "depth seed law" triple per line; '#' starts a comment.
struct ManifestEntry {
  int depth = 0;
  std::uint64_t seed = 0;
  LeafLaw law = LeafLaw::lognormal_leaves;
};
std::vector<ManifestEntry> parse_manifest(const std::string& text);

}  // namespace expint
