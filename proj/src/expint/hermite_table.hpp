#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace expint {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Uniform-grid piece of a table. In a log segment the stored values are
// log f and (log f)'.
struct TableSegment {
  double lo = 0.0;
  double step = 0.0;
  bool log_space = false;
  std::vector<double> values;
  std::vector<double> derivatives;
  // Bound on |error| / max(1, |value|) of the interpolant inside the segment,
  // measured in the stored representation.
  double error_bound = 0.0;

  double hi() const { return lo + step * static_cast<double>(values.size() - 1); }
  double node(std::size_t i) const { return lo + step * static_cast<double>(i); }
};

// Piecewise cubic Hermite interpolant over contiguous uniform segments.
class SpecialFunctionTable {
 public:
  SpecialFunctionTable() = default;
  SpecialFunctionTable(std::string name, std::vector<TableSegment> segments);

  const std::string& name() const { return name_; }
  const std::vector<TableSegment>& segments() const { return segments_; }
  Interval domain() const;
  double max_abs_error() const;

  bool contains(double x) const;

  // f(x); throws RangeError outside the domain or when exp(log f) overflows.
  double eval(double x) const;
  // log f(x); -inf where f vanishes.
  double eval_log(double x) const;
  // Derivative of the interpolant, converted to f'.
  double eval_derivative(double x) const;

  std::vector<double> grid() const;

  // Text format: a header line, one "# segment" line per segment, then
  // x<TAB>value<TAB>derivative rows at 17 significant digits.
  void write(std::ostream& out) const;
  static SpecialFunctionTable read(std::istream& in);

 private:
  struct Hit {
    const TableSegment* seg;
    double value;
    double slope;
  };
  Hit locate(double x) const;

  std::string name_;
  std::vector<TableSegment> segments_;
};

}  // namespace expint
