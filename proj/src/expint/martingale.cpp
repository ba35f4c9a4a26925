#include "expint/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "expint/errors.hpp"

namespace expint {

const char* law_name(LeafLaw law) {
  return law == LeafLaw::lognormal_leaves ? "lognormal_leaves" : "bounded_ratio";
}

LeafLaw parse_law(const std::string& name) {
  if (name == "lognormal_leaves" || name == "lognormal") return LeafLaw::lognormal_leaves;
  if (name == "bounded_ratio") return LeafLaw::bounded_ratio;
  throw FormatError("unknown leaf law '" + name + "'");
}

namespace {

void check_depth(int depth) {
  if (depth < 0) throw DomainError("martingale depth must be >= 0");
  if (depth > kMaxMartingaleDepth)
    throw ResourceError("martingale depth " + std::to_string(depth) + " exceeds the cap of " +
                        std::to_string(kMaxMartingaleDepth) + " (2^16 leaves)");
}

int depth_of(std::size_t count) {
  int d = 0;
  while ((std::size_t{1} << d) < count) ++d;
  if ((std::size_t{1} << d) != count) throw FormatError("leaf count must be a power of two");
  return d;
}

}  // namespace

DyadicMartingale::DyadicMartingale(std::vector<std::vector<double>> levels)
    : depth_(static_cast<int>(levels.size()) - 1), levels_(std::move(levels)) {}

DyadicMartingale DyadicMartingale::from_leaves(std::vector<double> leaves) {
  if (leaves.empty()) throw FormatError("martingale needs at least one leaf");
  const int depth = depth_of(leaves.size());
  check_depth(depth);
  double top = 0.0;
  for (double v : leaves) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("martingale leaves must be finite and > 0");
    top = std::max(top, v);
  }
  // Grid q = 2^(e + depth - 52) with 2^e >= max leaf: sums of siblings stay
  // within 53 bits at every level, so each average is computed exactly.
  int e;
  std::frexp(top, &e);
  const double q = std::ldexp(1.0, e + depth - 52);
  for (double& v : leaves) v = std::max(q, std::nearbyint(v / q) * q);
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(depth) + 1);
  levels[static_cast<std::size_t>(depth)] = std::move(leaves);
  for (int n = depth - 1; n >= 0; --n) {
    const auto& c = levels[static_cast<std::size_t>(n) + 1];
    auto& p = levels[static_cast<std::size_t>(n)];
    p.resize(c.size() / 2);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 0.5 * (c[2 * i] + c[2 * i + 1]);
  }
  return DyadicMartingale(std::move(levels));
}

DyadicMartingale DyadicMartingale::random(int depth, std::uint64_t seed, LeafLaw law) {
  check_depth(depth);
  std::mt19937_64 rng(seed);
  const std::size_t count = std::size_t{1} << depth;
  std::vector<double> leaves(count);
  if (law == LeafLaw::lognormal_leaves) {
    // Spread sigma drawn per tree so that some trees put leaves near 0.
    std::uniform_real_distribution<double> S(0.05, 2.0);
    std::normal_distribution<double> Z(0.0, 1.0);
    const double sigma = S(rng);
    for (double& v : leaves) v = std::exp(sigma * Z(rng));
  } else {
    // Top-down splitting xi -> xi (1 +- r), |r| < 0.89, so |d_n| / xi_{n-1} <= 0.9
    // survives the final rounding to the grid.
    std::uniform_real_distribution<double> U(-0.89, 0.89);
    std::vector<double> cur{1.0};
    for (int n = 0; n < depth; ++n) {
      std::vector<double> next(cur.size() * 2);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const double hi = cur[i] * (1.0 + U(rng));
        next[2 * i] = hi;
        next[2 * i + 1] = 2.0 * cur[i] - hi;
      }
      cur.swap(next);
    }
    leaves = std::move(cur);
  }
  return from_leaves(std::move(leaves));
}

std::string DyadicMartingale::serialize() const {
  std::string out = std::to_string(depth_) + "\n";
  char buf[40];
  for (double v : leaves()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  return out;
}

DyadicMartingale DyadicMartingale::parse(const std::string& text) {
  std::istringstream is(text);
  int depth;
  if (!(is >> depth)) throw FormatError("martingale text: missing depth");
  check_depth(depth);
  std::vector<double> leaves;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw FormatError("martingale text: bad number '" + tok + "'");
    }
    if (used != tok.size()) throw FormatError("martingale text: bad number '" + tok + "'");
    leaves.push_back(v);
  }
  if (leaves.size() != (std::size_t{1} << depth))
    throw FormatError("martingale text: expected " + std::to_string(std::size_t{1} << depth) + " leaves, got " +
                      std::to_string(leaves.size()));
  return from_leaves(std::move(leaves));
}

std::vector<std::vector<double>> partial_variation(const DyadicMartingale& m) {
  std::vector<std::vector<double>> qv(static_cast<std::size_t>(m.depth()) + 1);
  qv[0] = {0.0};
  for (int n = 1; n <= m.depth(); ++n) {
    const auto& prev = qv[static_cast<std::size_t>(n) - 1];
    auto& cur = qv[static_cast<std::size_t>(n)];
    cur.resize(prev.size() * 2);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double d = m.value(n, i) - m.value(n - 1, i / 2);
      cur[i] = prev[i / 2] + d * d;
    }
  }
  return qv;
}

QuadraticVariationField quadratic_variation(const DyadicMartingale& m) {
  return {partial_variation(m).back()};
}

std::vector<ManifestEntry> parse_manifest(const std::string& text) {
  std::vector<ManifestEntry> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string d, s, l, extra;
    if (!(ls >> d)) continue;
    if (!(ls >> s >> l) || (ls >> extra))
      throw FormatError("manifest line " + std::to_string(lineno) + ": expected 'depth seed law'");
    ManifestEntry e;
    try {
      std::size_t u1 = 0, u2 = 0;
      e.depth = std::stoi(d, &u1);
      e.seed = std::stoull(s, &u2);
      if (u1 != d.size() || u2 != s.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": bad depth or seed");
    }
    e.law = parse_law(l);
    check_depth(e.depth);
    out.push_back(e);
  }
  return out;
}

}  // namespace expint
