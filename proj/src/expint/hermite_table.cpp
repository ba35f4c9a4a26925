#include "expint/hermite_table.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "expint/errors.hpp"

namespace expint {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string range_message(const std::string& name, double x, Interval d) {
  std::ostringstream os;
  os << name << ": argument " << fmt17(x) << " outside table domain [" << fmt17(d.lo) << ", " << fmt17(d.hi) << "]";
  return os.str();
}

}  // namespace

SpecialFunctionTable::SpecialFunctionTable(std::string name, std::vector<TableSegment> segments)
    : name_(std::move(name)), segments_(std::move(segments)) {
  if (segments_.empty()) throw FormatError("table " + name_ + ": no segments");
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& seg = segments_[s];
    if (seg.values.size() < 2 || seg.values.size() != seg.derivatives.size() || !(seg.step > 0.0))
      throw FormatError("table " + name_ + ": malformed segment");
    for (std::size_t i = 0; i < seg.values.size(); ++i) {
      const bool ok_value = std::isfinite(seg.values[i]) || (seg.log_space && seg.values[i] == -INFINITY);
      if (!ok_value || !std::isfinite(seg.derivatives[i]))
        throw FormatError("table " + name_ + ": non-finite entry");
    }
    if (!(seg.error_bound > 0.0)) throw FormatError("table " + name_ + ": error bound must be positive");
    if (s > 0) {
      const double prev = segments_[s - 1].hi();
      if (std::abs(prev - seg.lo) > 1e-12 * std::max(1.0, std::abs(prev)))
        throw FormatError("table " + name_ + ": segments are not contiguous");
    }
  }
}

Interval SpecialFunctionTable::domain() const { return {segments_.front().lo, segments_.back().hi()}; }

double SpecialFunctionTable::max_abs_error() const {
  double e = 0.0;
  for (const auto& s : segments_) e = std::max(e, s.error_bound);
  return e;
}

bool SpecialFunctionTable::contains(double x) const {
  const Interval d = domain();
  return x >= d.lo && x <= d.hi;
}

SpecialFunctionTable::Hit SpecialFunctionTable::locate(double x) const {
  if (!contains(x)) throw RangeError(range_message(name_, x, domain()));
  const TableSegment* seg = &segments_.back();
  for (const auto& s : segments_) {
    if (x <= s.hi()) {
      seg = &s;
      break;
    }
  }
  const std::size_t n = seg->values.size();
  double pos = (x - seg->lo) / seg->step;
  std::size_t i = pos <= 0.0 ? 0 : static_cast<std::size_t>(pos);
  if (i > n - 2) i = n - 2;
  const double h = seg->step;
  const double t = (x - seg->node(i)) / h;
  const double y0 = seg->values[i], y1 = seg->values[i + 1];
  const double d0 = seg->derivatives[i] * h, d1 = seg->derivatives[i + 1] * h;
  if (t == 0.0) return {seg, y0, seg->derivatives[i]};
  if (y0 == -INFINITY) return {seg, -INFINITY, 0.0};
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double value = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
  const double g00 = 6 * t2 - 6 * t, g10 = 3 * t2 - 4 * t + 1, g01 = -6 * t2 + 6 * t, g11 = 3 * t2 - 2 * t;
  const double slope = (g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1) / h;
  return {seg, value, slope};
}

double SpecialFunctionTable::eval(double x) const {
  const Hit hit = locate(x);
  if (!hit.seg->log_space) return hit.value;
  const double v = std::exp(hit.value);
  if (!std::isfinite(v))
    throw RangeError(name_ + ": value at " + fmt17(x) + " overflows double; use the log form");
  return v;
}

double SpecialFunctionTable::eval_log(double x) const {
  const Hit hit = locate(x);
  if (hit.seg->log_space) return hit.value;
  return hit.value > 0.0 ? std::log(hit.value) : (hit.value == 0.0 ? -INFINITY : NAN);
}

double SpecialFunctionTable::eval_derivative(double x) const {
  const Hit hit = locate(x);
  if (!hit.seg->log_space) return hit.slope;
  const double v = std::exp(hit.value) * hit.slope;
  if (!std::isfinite(v))
    throw RangeError(name_ + ": derivative at " + fmt17(x) + " overflows double");
  return v;
}

std::vector<double> SpecialFunctionTable::grid() const {
  std::vector<double> g;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& seg = segments_[s];
    for (std::size_t i = (s == 0 ? 0 : 1); i < seg.values.size(); ++i) g.push_back(seg.node(i));
  }
  return g;
}

void SpecialFunctionTable::write(std::ostream& out) const {
  const Interval d = domain();
  out << "expint-table\tv1\t" << name_ << "\tdomain\t" << fmt17(d.lo) << '\t' << fmt17(d.hi) << "\tmax_error\t"
      << fmt17(max_abs_error()) << "\tsegments\t" << segments_.size() << '\n';
  for (const auto& seg : segments_) {
    out << "# segment\t" << (seg.log_space ? "log" : "linear") << '\t' << fmt17(seg.lo) << '\t' << fmt17(seg.step)
        << '\t' << seg.values.size() << '\t' << fmt17(seg.error_bound) << '\n';
    for (std::size_t i = 0; i < seg.values.size(); ++i)
      out << fmt17(seg.node(i)) << '\t' << fmt17(seg.values[i]) << '\t' << fmt17(seg.derivatives[i]) << '\n';
  }
}

SpecialFunctionTable SpecialFunctionTable::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("table: empty input");
  std::istringstream hs(line);
  std::string magic, version, name, kw_dom, kw_err, kw_seg;
  double lo, hi, err;
  std::size_t nseg;
  if (!(hs >> magic >> version >> name >> kw_dom >> lo >> hi >> kw_err >> err >> kw_seg >> nseg) ||
      magic != "expint-table" || version != "v1")
    throw FormatError("table: bad header line");
  std::vector<TableSegment> segs;
  for (std::size_t s = 0; s < nseg; ++s) {
    if (!std::getline(in, line)) throw FormatError("table: missing segment header");
    std::istringstream ss(line);
    std::string hash, kw, mode;
    std::size_t count;
    TableSegment seg;
    if (!(ss >> hash >> kw >> mode >> seg.lo >> seg.step >> count >> seg.error_bound) || hash != "#" ||
        kw != "segment" || (mode != "log" && mode != "linear"))
      throw FormatError("table: bad segment header");
    seg.log_space = mode == "log";
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) throw FormatError("table: truncated segment");
      std::istringstream rs(line);
      std::string xs, vs, ds;
      if (!std::getline(rs, xs, '\t') || !std::getline(rs, vs, '\t') || !std::getline(rs, ds))
        throw FormatError("table: bad row");
      try {
        const double x = std::stod(xs);
        if (std::abs(x - seg.node(i)) > 1e-9 * std::max(1.0, std::abs(x)))
          throw FormatError("table: row abscissa does not match the segment grid");
        seg.values.push_back(vs == "-inf" ? -INFINITY : std::stod(vs));
        seg.derivatives.push_back(std::stod(ds));
      } catch (const std::logic_error&) {
        throw FormatError("table: unparsable number in row");
      }
    }
    segs.push_back(std::move(seg));
  }
  SpecialFunctionTable t(name, std::move(segs));
  const Interval d = t.domain();
  if (std::abs(d.lo - lo) > 1e-12 * std::max(1.0, std::abs(lo)) || std::abs(d.hi - hi) > 1e-9 * std::max(1.0, std::abs(hi)))
    throw FormatError("table: header domain disagrees with the rows");
  return t;
}

}  // namespace expint
