#include "expint/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "expint/parallel.hpp"
#include "json.hpp"

namespace expint {

int default_jobs() {
  if (const char* env = std::getenv("EXPINT_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void VerificationReport::finalize() {
  if (std::isnan(min_margin)) min_margin = -std::numeric_limits<double>::infinity();
  passed = min_margin >= -tolerance;
}

void MarginTracker::observe(double margin, std::vector<double> point) {
  ++count;
  if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
  if (margin < min_margin || witness.empty()) {
    min_margin = margin;
    witness = std::move(point);
  }
}

void MarginTracker::merge(const MarginTracker& other) {
  count += other.count;
  if (other.witness.empty()) return;
  if (witness.empty() || other.min_margin < min_margin) {
    min_margin = other.min_margin;
    witness = other.witness;
  }
}

void MarginTracker::into(VerificationReport& r) const {
  r.samples = count;
  r.min_margin = min_margin;
  r.worst_witness = witness;
}

namespace {

nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

std::string to_json(const VerificationReport& r, bool include_timing) {
  nlohmann::ordered_json j;
  j["check_name"] = r.check_name;
  j["samples"] = r.samples;
  j["min_margin"] = num(r.min_margin);
  auto w = nlohmann::ordered_json::array();
  for (double v : r.worst_witness) w.push_back(num(v));
  j["worst_witness"] = w;
  j["tolerance"] = num(r.tolerance);
  j["passed"] = r.passed;
  j["elapsed_ms"] = include_timing ? nlohmann::ordered_json(r.elapsed_ms) : nlohmann::ordered_json(nullptr);
  j["seed"] = r.seed;
  j["domain"] = r.domain;
  j["gating"] = r.gating;
  auto m = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metrics) m[k] = num(v);
  j["metrics"] = m;
  j["notes"] = r.notes;
  return j.dump();
}

std::string to_record(const VerificationReport& r, bool include_timing) {
  std::ostringstream os;
  os << "check=" << r.check_name << "\tpassed=" << (r.passed ? "true" : "false")
     << "\tgating=" << (r.gating ? "true" : "false") << "\tsamples=" << r.samples
     << "\tmin_margin=" << format_double(r.min_margin) << "\ttolerance=" << format_double(r.tolerance)
     << "\tseed=" << r.seed << "\twitness=";
  for (std::size_t i = 0; i < r.worst_witness.size(); ++i)
    os << (i ? "," : "") << format_double(r.worst_witness[i]);
  os << "\telapsed_ms=" << (include_timing ? format_double(r.elapsed_ms) : "null");
  for (const auto& [k, v] : r.metrics) os << '\t' << k << '=' << format_double(v);
  return os.str();
}

std::string to_human(const VerificationReport& r, bool include_timing) {
  std::ostringstream os;
  const char* status = !r.gating ? "INFO" : (r.passed ? "PASS" : "FAIL");
  char margin[64];
  std::snprintf(margin, sizeof margin, "%.6g", r.min_margin);
  os << '[' << status << "] " << r.check_name << "  samples=" << r.samples << "  min_margin=" << margin
     << "  tol=" << r.tolerance;
  if (include_timing) os << "  (" << static_cast<long long>(std::llround(r.elapsed_ms)) << " ms)";
  os << '\n';
  if (!r.domain.empty()) os << "    domain: " << r.domain << '\n';
  if (!r.worst_witness.empty()) {
    os << "    worst witness: (";
    for (std::size_t i = 0; i < r.worst_witness.size(); ++i) os << (i ? ", " : "") << format_double(r.worst_witness[i]);
    os << ")\n";
  }
  for (const auto& [k, v] : r.metrics) os << "    " << k << " = " << format_double(v) << '\n';
  for (const auto& n : r.notes) os << "    note: " << n << '\n';
  return os.str();
}

Tolerances::Tolerances()
    : values_{{"kernel_roundtrip", 1e-11}, {"F_boundary_value", 1e-12}, {"F_boundary_slope", 1e-6},
              {"F_boundary_curvature", 1e-4}, {"F_consistency", 1e-6}, {"F_identity", 1e-8},
              {"G_derivative", 1e-7}, {"psd", 1e-8}, {"det", 1e-7}, {"F_bound", 1e-9},
              {"sandwich", 1e-10}, {"heat_closed_form", 1e-9}, {"heat_fd", 1e-5},
              {"concavity", 1e-10}, {"four_point", 1e-9}, {"taylor", 0.02}, {"flow", 1e-12},
              {"endpoint", 1e-10}, {"mc_se_multiplier", 3.0}, {"martingale", 1e-9},
              {"sharpness_rhs", 1e-3}, {"counterexample", 1e-8}, {"tree_identity", 1e-12},
              {"heat_semigroup", 1e-10}} {}

double Tolerances::get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw std::invalid_argument("unknown tolerance name: " + name);
  return it->second;
}

void Tolerances::set(const std::string& name, double value) {
  auto it = values_.find(name);
  if (it == values_.end()) throw std::invalid_argument("unknown tolerance name: " + name);
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("tolerance must be finite and >= 0: " + name);
  it->second = value;
}

void ScanDomain::validate() const {
  if (axes.empty()) throw std::invalid_argument("scan domain has no axes");
  for (const auto& a : axes) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.lo > a.hi)
      throw std::invalid_argument("scan domain axis needs finite lo <= hi");
    if (a.scale == Scale::log && !(a.lo > 0.0)) throw std::invalid_argument("log-scale axis needs lo > 0");
  }
  if (samples_per_axis <= 0 && random_count == 0) throw std::invalid_argument("scan domain is empty");
}

std::uint64_t ScanDomain::grid_size() const {
  if (samples_per_axis <= 0) return 0;
  std::uint64_t n = 1;
  for (const auto& a : axes) n *= (a.lo == a.hi) ? 1u : static_cast<std::uint64_t>(samples_per_axis);
  return n;
}

double ScanDomain::axis_value(std::size_t axis, int i) const {
  const Axis& a = axes[axis];
  if (a.lo == a.hi || samples_per_axis == 1) return a.lo;
  const double f = static_cast<double>(i) / static_cast<double>(samples_per_axis - 1);
  if (a.scale == Scale::log) {
    if (i == samples_per_axis - 1) return a.hi;
    return std::exp(std::log(a.lo) + f * (std::log(a.hi) - std::log(a.lo)));
  }
  if (i == samples_per_axis - 1) return a.hi;
  return a.lo + f * (a.hi - a.lo);
}

std::vector<double> ScanDomain::grid_point(std::uint64_t index) const {
  std::vector<double> p(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::uint64_t n = (axes[k].lo == axes[k].hi) ? 1u : static_cast<std::uint64_t>(samples_per_axis);
    p[k] = axis_value(k, static_cast<int>(index % n));
    index /= n;
  }
  return p;
}

std::string ScanDomain::describe() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const auto& a = axes[k];
    os << (k ? " x " : "") << '[' << format_double(a.lo) << ',' << format_double(a.hi) << ']'
       << (a.scale == Scale::log ? "log" : "");
  }
  if (samples_per_axis > 0) os << " grid " << samples_per_axis << "/axis";
  if (random_count > 0) os << " random " << random_count << " seed " << seed;
  return os.str();
}

}  // namespace expint
