#include "expint/expint.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "expint/errors.hpp"
#include "expint/kernel.hpp"
#include "expint/martingale_checks.hpp"
#include "expint/parallel.hpp"
#include "expint/special_functions.hpp"
#include "expint/suites.hpp"

struct expint_options {
  expint::SuiteOptions opt;
};

struct expint_run {
  expint::SuiteResult result;
  mutable std::vector<std::string> text_cache;
};

struct expint_martingale {
  expint::DyadicMartingale m;
};

namespace {

thread_local std::string last_error;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

expint_status fail(expint_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Runs fn and maps exceptions to status codes.
template <class Fn>
expint_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return EXPINT_OK;
  } catch (const expint::DomainError& e) {
    return fail(EXPINT_ERR_DOMAIN, e.what());
  } catch (const expint::RangeError& e) {
    return fail(EXPINT_ERR_RANGE, e.what());
  } catch (const expint::ResourceError& e) {
    return fail(EXPINT_ERR_RESOURCE, e.what());
  } catch (const expint::FormatError& e) {
    return fail(EXPINT_ERR_FORMAT, e.what());
  } catch (const IoError& e) {
    return fail(EXPINT_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(EXPINT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EXPINT_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return fail(EXPINT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EXPINT_ERR_INTERNAL, "unknown error");
  }
}

#define REQUIRE_ARG(cond, msg) \
  if (!(cond)) return fail(EXPINT_ERR_INVALID_ARGUMENT, msg)

struct Function {
  const char* name;
  size_t arity;
  std::function<double(const double*)> fn;
};

const std::vector<Function>& functions() {
  using namespace expint;
  static const std::vector<Function> table{
      {"inv_mills", 1, [](const double* a) { return inv_mills(a[0]); }},
      {"k", 1, [](const double* a) { return kernel_eval(a[0]).k; }},
      {"k1", 1, [](const double* a) { return kernel_eval(a[0]).k_prime; }},
      {"k2", 1, [](const double* a) { return kernel_eval(a[0]).k_double_prime; }},
      {"inv_k1", 1, [](const double* a) { return inv_k_prime(a[0]); }},
      {"F", 1, [](const double* a) { return F_eval(a[0]); }},
      {"logF", 1, [](const double* a) { return log_F_eval(a[0]); }},
      {"F1", 1, [](const double* a) { return F_prime(a[0]); }},
      {"F2", 1, [](const double* a) { return F_second(a[0]); }},
      {"G", 1, [](const double* a) { return G_eval(a[0]); }},
      {"G1", 1, [](const double* a) { return G_prime(a[0]); }},
      {"G2", 1, [](const double* a) { return G_second(a[0]); }},
      {"M", 2, [](const double* a) { return M_eval(a[0], a[1]); }},
      {"N", 2, [](const double* a) { return N_eval(a[0], a[1]); }},
      {"N_t", 2, [](const double* a) { return N_t(a[0], a[1]); }},
      {"N_tt", 2, [](const double* a) { return N_tt(a[0], a[1]); }},
      {"N_p", 2, [](const double* a) { return N_p(a[0], a[1]); }},
      {"N_pp", 2, [](const double* a) { return N_pp(a[0], a[1]); }},
      {"N_sup", 2, [](const double* a) { return N_sup_eval(a[0], a[1]); }},
      {"N_sup_tt", 2, [](const double* a) { return N_sup_tt(a[0], a[1]); }},
      {"N_sup_residual", 2, [](const double* a) { return N_sup_residual(a[0], a[1]); }},
      {"bound_rhs", 2, [](const double* a) { return bound_rhs(a[0], a[1]); }},
  };
  return table;
}

const Function* find_function(const char* name) {
  if (!name) return nullptr;
  for (const auto& f : functions())
    if (std::strcmp(f.name, name) == 0) return &f;
  return nullptr;
}

// Relative interpolation bound of the table segment holding x.
double table_bound(const expint::SpecialFunctionTable& T, double x) {
  for (const auto& s : T.segments())
    if (x >= s.lo && x <= s.hi()) return s.error_bound;
  return T.max_abs_error();
}

}  // namespace

extern "C" {

const char* expint_version(void) { return "1.0.0"; }

const char* expint_status_string(expint_status status) {
  switch (status) {
    case EXPINT_OK: return "ok";
    case EXPINT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case EXPINT_ERR_DOMAIN: return "domain error";
    case EXPINT_ERR_RANGE: return "range error";
    case EXPINT_ERR_RESOURCE: return "resource error";
    case EXPINT_ERR_FORMAT: return "format error";
    case EXPINT_ERR_IO: return "i/o error";
    case EXPINT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* expint_last_error(void) { return last_error.c_str(); }

int expint_default_jobs(void) { return expint::default_jobs(); }

void expint_string_free(char* s) { std::free(s); }

size_t expint_function_arity(const char* name) {
  const Function* f = find_function(name);
  return f ? f->arity : 0;
}

expint_status expint_eval(const char* name, const double* args, size_t nargs, double* out) {
  const Function* f = find_function(name);
  REQUIRE_ARG(f, std::string("unknown function '") + (name ? name : "(null)") + "'");
  REQUIRE_ARG(nargs == f->arity, std::string(f->name) + " takes " + std::to_string(f->arity) + " argument(s)");
  REQUIRE_ARG(args && out, "null pointer");
  return guarded([&] { *out = f->fn(args); });
}

expint_status expint_eval_error_bound(const char* name, const double* args, size_t nargs, double* out) {
  double v = 0.0;
  const expint_status s = expint_eval(name, args, nargs, &v);
  if (s != EXPINT_OK) return s;
  return guarded([&] {
    const std::string n = name;
    const double mag = std::max(1.0, std::abs(v));
    if (n == "F") {
      const auto& T = expint::F_table();
      // Log segments bound the error of log F, which is relative in F.
      const double b = table_bound(T, args[0]);
      *out = args[0] > expint::kFLogSwitch ? b * std::max(1.0, std::abs(std::log(v))) * v : b * mag;
    } else if (n == "logF") {
      *out = table_bound(expint::F_table(), args[0]) * mag;
    } else if (n == "G" || n == "N" || n == "M") {
      *out = expint::G_table().max_abs_error() * mag;
    } else {
      *out = 64.0 * 2.220446049250313e-16 * mag;
    }
  });
}

expint_status expint_table_export(const char* name, const char* path) {
  REQUIRE_ARG(name && path, "null pointer");
  const std::string n = name;
  REQUIRE_ARG(n == "F" || n == "G", "table name must be F or G");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + std::string(path) + "' for writing");
    (n == "F" ? expint::F_table() : expint::G_table()).write(out);
    if (!out) throw IoError("write to '" + std::string(path) + "' failed");
  });
}

expint_status expint_options_create(expint_options** out) {
  REQUIRE_ARG(out, "null pointer");
  return guarded([&] {
    auto* o = new expint_options;
    o->opt.jobs = expint::default_jobs();
    *out = o;
  });
}

void expint_options_destroy(expint_options* opts) { delete opts; }

expint_status expint_options_set_seed(expint_options* opts, uint64_t seed) {
  REQUIRE_ARG(opts, "null options");
  opts->opt.seed = seed;
  return EXPINT_OK;
}

expint_status expint_options_set_samples(expint_options* opts, uint64_t samples) {
  REQUIRE_ARG(opts, "null options");
  REQUIRE_ARG(samples > 0, "samples must be positive");
  opts->opt.samples = samples;
  return EXPINT_OK;
}

expint_status expint_options_set_nodes(expint_options* opts, int nodes) {
  REQUIRE_ARG(opts, "null options");
  REQUIRE_ARG(nodes >= 8 && nodes <= 512, "nodes must lie in [8, 512]");
  opts->opt.nodes = nodes;
  return EXPINT_OK;
}

expint_status expint_options_set_depth(expint_options* opts, int depth) {
  REQUIRE_ARG(opts, "null options");
  if (depth > expint::kMaxMartingaleDepth) return fail(EXPINT_ERR_RESOURCE, "depth exceeds the cap of 16");
  REQUIRE_ARG(depth >= 0, "depth must be >= 0");
  opts->opt.depth = depth;
  return EXPINT_OK;
}

expint_status expint_options_set_jobs(expint_options* opts, int jobs) {
  REQUIRE_ARG(opts, "null options");
  REQUIRE_ARG(jobs >= 1, "jobs must be >= 1");
  opts->opt.jobs = jobs;
  return EXPINT_OK;
}

expint_status expint_options_set_brownian_paths(expint_options* opts, uint64_t paths) {
  REQUIRE_ARG(opts, "null options");
  REQUIRE_ARG(paths >= 2, "need at least 2 paths");
  opts->opt.brownian_paths = paths;
  return EXPINT_OK;
}

expint_status expint_options_set_tolerance(expint_options* opts, const char* name, double value) {
  REQUIRE_ARG(opts && name, "null pointer");
  REQUIRE_ARG(std::isfinite(value) && value >= 0.0, "tolerance must be finite and >= 0");
  return guarded([&] { opts->opt.tol.set(name, value); });
}

expint_status expint_options_get_tolerance(const expint_options* opts, const char* name, double* out) {
  REQUIRE_ARG(opts && name && out, "null pointer");
  return guarded([&] { *out = opts->opt.tol.get(name); });
}

const char* expint_tolerance_names(void) {
  static const std::string names = [] {
    const expint::Tolerances defaults;
    std::string s;
    for (const auto& [k, v] : defaults.all()) s += (s.empty() ? "" : ",") + k;
    return s;
  }();
  return names.c_str();
}

int expint_is_suite(const char* name) { return name && expint::is_suite(name) ? 1 : 0; }

expint_status expint_run_suite(const char* suite, const expint_options* opts, expint_run** out) {
  REQUIRE_ARG(suite && out, "null pointer");
  REQUIRE_ARG(expint::is_suite(suite), std::string("unknown suite '") + suite + "'");
  return guarded([&] {
    expint::SuiteOptions o = opts ? opts->opt : expint::SuiteOptions{};
    auto run = std::make_unique<expint_run>();
    run->result = expint::run_suite(suite, o);
    *out = run.release();
  });
}

void expint_run_destroy(expint_run* run) { delete run; }

int expint_run_passed(const expint_run* run) { return run && run->result.passed() ? 1 : 0; }

size_t expint_run_report_count(const expint_run* run) { return run ? run->result.reports.size() : 0; }

expint_status expint_run_report_info(const expint_run* run, size_t index, expint_report_info* out) {
  REQUIRE_ARG(run && out, "null pointer");
  REQUIRE_ARG(index < run->result.reports.size(), "report index out of range");
  const auto& r = run->result.reports[index];
  out->check_name = r.check_name.c_str();
  out->samples = r.samples;
  out->min_margin = r.min_margin;
  out->tolerance = r.tolerance;
  out->passed = r.passed ? 1 : 0;
  out->gating = r.gating ? 1 : 0;
  out->elapsed_ms = r.elapsed_ms;
  return EXPINT_OK;
}

expint_status expint_run_report_text(const expint_run* run, size_t index, expint_format format, int include_timing,
                                     const char** out) {
  REQUIRE_ARG(run && out, "null pointer");
  REQUIRE_ARG(index < run->result.reports.size(), "report index out of range");
  return guarded([&] {
    const auto& r = run->result.reports[index];
    std::string text;
    switch (format) {
      case EXPINT_FORMAT_HUMAN: text = expint::to_human(r, include_timing != 0); break;
      case EXPINT_FORMAT_MACHINE: text = expint::to_json(r, include_timing != 0); break;
      case EXPINT_FORMAT_RECORD: text = expint::to_record(r, include_timing != 0); break;
      default: throw std::invalid_argument("unknown format");
    }
    run->text_cache.push_back(std::move(text));
    *out = run->text_cache.back().c_str();
  });
}

size_t expint_run_export_count(const expint_run* run) { return run ? run->result.exports.size() : 0; }

expint_status expint_run_export(const expint_run* run, size_t index, const char** stem, const char** text) {
  REQUIRE_ARG(run && stem && text, "null pointer");
  REQUIRE_ARG(index < run->result.exports.size(), "export index out of range");
  *stem = run->result.exports[index].first.c_str();
  *text = run->result.exports[index].second.c_str();
  return EXPINT_OK;
}

expint_status expint_martingale_random(int depth, uint64_t seed, const char* law, expint_martingale** out) {
  REQUIRE_ARG(law && out, "null pointer");
  return guarded([&] {
    *out = new expint_martingale{expint::DyadicMartingale::random(depth, seed, expint::parse_law(law))};
  });
}

expint_status expint_martingale_from_leaves(const double* leaves, size_t count, expint_martingale** out) {
  REQUIRE_ARG(leaves && out, "null pointer");
  return guarded([&] {
    *out = new expint_martingale{expint::DyadicMartingale::from_leaves(std::vector<double>(leaves, leaves + count))};
  });
}

expint_status expint_martingale_parse(const char* text, expint_martingale** out) {
  REQUIRE_ARG(text && out, "null pointer");
  return guarded([&] { *out = new expint_martingale{expint::DyadicMartingale::parse(text)}; });
}

void expint_martingale_destroy(expint_martingale* m) { delete m; }

int expint_martingale_depth(const expint_martingale* m) { return m ? m->m.depth() : -1; }

size_t expint_martingale_leaf_count(const expint_martingale* m) { return m ? m->m.leaves().size() : 0; }

size_t expint_martingale_leaves(const expint_martingale* m, double* out, size_t capacity) {
  if (!m || !out) return 0;
  const auto& v = m->m.leaves();
  const size_t n = std::min(capacity, v.size());
  std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), out);
  return n;
}

size_t expint_martingale_quadratic_variation(const expint_martingale* m, double* out, size_t capacity) {
  if (!m || !out) return 0;
  const auto qv = expint::quadratic_variation(m->m);
  const size_t n = std::min(capacity, qv.values.size());
  std::copy(qv.values.begin(), qv.values.begin() + static_cast<std::ptrdiff_t>(n), out);
  return n;
}

expint_status expint_martingale_serialize(const expint_martingale* m, char** out) {
  REQUIRE_ARG(m && out, "null pointer");
  return guarded([&] {
    const std::string s = m->m.serialize();
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
  });
}

expint_status expint_martingale_check(const expint_martingale* m, const expint_options* opts, expint_run** out) {
  REQUIRE_ARG(m && out, "null pointer");
  return guarded([&] {
    const expint::Tolerances tol = opts ? opts->opt.tol : expint::Tolerances{};
    auto run = std::make_unique<expint_run>();
    run->result.suite = "martingale_tree";
    auto& r = run->result.reports;
    r.push_back(expint::check_theorem_martingale(m->m, tol));
    r.push_back(expint::check_log_bounds(m->m, tol));
    r.push_back(expint::bellman_induction_check(m->m, expint::BellmanKind::N, tol));
    r.push_back(expint::bellman_induction_check(m->m, expint::BellmanKind::N_sup, tol));
    r.push_back(expint::check_tree_identities(m->m, tol));
    *out = run.release();
  });
}

expint_status expint_martingale_manifest(const char* text, const expint_options* opts, expint_run** out) {
  REQUIRE_ARG(text && out, "null pointer");
  return guarded([&] {
    const expint::SuiteOptions o = opts ? opts->opt : expint::SuiteOptions{};
    auto run = std::make_unique<expint_run>();
    run->result.suite = "martingale_manifest";
    run->result.reports = expint::run_martingale_manifest(expint::parse_manifest(text), o.jobs, o.tol);
    *out = run.release();
  });
}

}  // extern "C"
