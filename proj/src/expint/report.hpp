#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace expint {

struct VerificationReport {
  std::string check_name;
  std::uint64_t samples = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> worst_witness;
  double tolerance = 0.0;
  bool passed = false;
  double elapsed_ms = 0.0;
  std::uint64_t seed = 0;
  std::string domain;
  // Exploratory checks report but never decide the exit status.
  bool gating = true;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> metrics;

  // passed <=> min_margin >= -tolerance; a NaN margin counts as -inf.
  void finalize();
  void metric(const std::string& name, double value) { metrics.emplace_back(name, value); }
};

// Running minimum of margins with the witness that attains it. Merging keeps
// the earlier witness on ties, so block-wise reductions are order-stable.
struct MarginTracker {
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> witness;
  std::uint64_t count = 0;

  void observe(double margin, std::vector<double> point);
  template <class... T>
  void observe_at(double margin, T... coords) {
    ++count;
    if (margin != margin) margin = -std::numeric_limits<double>::infinity();
    if (margin < min_margin || witness.empty()) {
      min_margin = margin;
      witness = {static_cast<double>(coords)...};
    }
  }
  void merge(const MarginTracker& other);
  void into(VerificationReport& r) const;
};

// Single-line JSON document with a fixed key order. Non-finite numbers are
// written as the strings "inf", "-inf", "nan". elapsed_ms is null unless
// include_timing is set, which keeps the output byte-reproducible.
std::string to_json(const VerificationReport& r, bool include_timing);
// Tab-separated key=value record.
std::string to_record(const VerificationReport& r, bool include_timing);
// Multi-line human summary.
std::string to_human(const VerificationReport& r, bool include_timing);

// Named numerical slacks; unknown names are rejected.
class Tolerances {
 public:
  Tolerances();
  double get(const std::string& name) const;
  void set(const std::string& name, double value);
  bool has(const std::string& name) const { return values_.count(name) != 0; }
  const std::map<std::string, double>& all() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

// Axis of a scan; lo == hi gives a degenerate single-value axis.
enum class Scale { linear, log };
struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  Scale scale = Scale::linear;
};

struct ScanDomain {
  std::vector<Axis> axes;
  int samples_per_axis = 0;
  std::uint64_t random_count = 0;
  std::uint64_t seed = 0;

  void validate() const;
  std::uint64_t grid_size() const;
  // Coordinates of the flat grid index (first axis varies slowest).
  std::vector<double> grid_point(std::uint64_t index) const;
  double axis_value(std::size_t axis, int i) const;
  std::string describe() const;
};

std::string format_double(double v);

// Seeded draw of one coordinate of an axis (uniform or log-uniform).
template <class Rng>
double draw_axis(const Axis& a, Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double u = U(rng);
  if (a.scale == Scale::log) return std::exp(std::log(a.lo) + u * (std::log(a.hi) - std::log(a.lo)));
  return a.lo + u * (a.hi - a.lo);
}
}  // namespace expint
