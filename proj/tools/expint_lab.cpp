#include <expint/expint.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Config {
  uint64_t seed = 42;
  uint64_t samples = 0;
  int nodes = 128;
  int depth = 10;
  int jobs = 0;
  uint64_t brownian_paths = 0;
  std::vector<std::string> tolerances;
  std::string out;
  std::string format = "human";
  bool timing = false;
  std::string export_dir;
  std::vector<std::string> eval;
  std::string export_table;
  std::string manifest;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunDeleter {
  void operator()(expint_run* r) const { expint_run_destroy(r); }
};
struct OptionsDeleter {
  void operator()(expint_options* o) const { expint_options_destroy(o); }
};
using RunPtr = std::unique_ptr<expint_run, RunDeleter>;
using OptionsPtr = std::unique_ptr<expint_options, OptionsDeleter>;

std::string error_text(expint_status s) {
  std::string msg = expint_status_string(s);
  const std::string detail = expint_last_error();
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

void check(expint_status s, bool usage = false) {
  if (s == EXPINT_OK) return;
  if (usage || s == EXPINT_ERR_INVALID_ARGUMENT) throw UsageError(error_text(s));
  throw std::runtime_error(error_text(s));
}

OptionsPtr make_options(const Config& cfg) {
  expint_options* raw = nullptr;
  check(expint_options_create(&raw));
  OptionsPtr opts(raw);
  check(expint_options_set_seed(raw, cfg.seed));
  if (cfg.samples) check(expint_options_set_samples(raw, cfg.samples), true);
  check(expint_options_set_nodes(raw, cfg.nodes), true);
  check(expint_options_set_depth(raw, cfg.depth), true);
  if (cfg.jobs) check(expint_options_set_jobs(raw, cfg.jobs), true);
  if (cfg.brownian_paths) check(expint_options_set_brownian_paths(raw, cfg.brownian_paths), true);
  for (const auto& spec : cfg.tolerances) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--tol expects name=value, got '" + spec + "'");
    const std::string name = spec.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(spec.substr(eq + 1), &used);
      if (used != spec.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError("--tol value for '" + name + "' is not a number");
    }
    if (expint_options_set_tolerance(raw, name.c_str(), value) != EXPINT_OK)
      throw UsageError(std::string(expint_last_error()) + " (known: " + expint_tolerance_names() + ")");
  }
  return opts;
}

// Writes every report, then the worst witnesses of failed gating checks.
int emit(const expint_run* run, const Config& cfg) {
  const expint_format fmt = cfg.format == "machine" ? EXPINT_FORMAT_MACHINE : EXPINT_FORMAT_HUMAN;
  std::ostringstream body;
  const size_t n = expint_run_report_count(run);
  for (size_t i = 0; i < n; ++i) {
    const char* text = nullptr;
    check(expint_run_report_text(run, i, fmt, cfg.timing ? 1 : 0, &text));
    body << text;
    if (fmt == EXPINT_FORMAT_MACHINE || (*text && text[std::strlen(text) - 1] != '\n')) body << '\n';
    if (fmt == EXPINT_FORMAT_HUMAN) body << '\n';
  }

  if (cfg.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + cfg.out + "'");
    f << body.str();
  }

  if (!cfg.export_dir.empty()) {
    std::filesystem::create_directories(cfg.export_dir);
    for (size_t i = 0; i < expint_run_export_count(run); ++i) {
      const char* stem = nullptr;
      const char* text = nullptr;
      check(expint_run_export(run, i, &stem, &text));
      const auto path = std::filesystem::path(cfg.export_dir) / (std::string(stem) + ".txt");
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
      f << text;
    }
  }

  size_t gating = 0, failed = 0;
  for (size_t i = 0; i < n; ++i) {
    expint_report_info info{};
    check(expint_run_report_info(run, i, &info));
    if (!info.gating) continue;
    ++gating;
    if (info.passed) continue;
    ++failed;
    const char* text = nullptr;
    check(expint_run_report_text(run, i, EXPINT_FORMAT_HUMAN, 0, &text));
    std::cerr << "FAILED " << text << "\n";
  }
  std::cerr << (failed ? "FAIL" : "PASS") << ": " << gating - failed << "/" << gating << " gating checks passed\n";
  return failed ? kExitFail : kExitPass;
}

int run_suite(const std::string& suite, const Config& cfg) {
  const OptionsPtr opts = make_options(cfg);
  expint_run* raw = nullptr;
  check(expint_run_suite(suite.c_str(), opts.get(), &raw));
  const RunPtr run(raw);
  return emit(run.get(), cfg);
}

int run_eval(const Config& cfg) {
  const std::string& name = cfg.eval.front();
  const size_t arity = expint_function_arity(name.c_str());
  if (arity == 0) throw UsageError("unknown function '" + name + "'");
  if (cfg.eval.size() - 1 != arity)
    throw UsageError(name + " takes " + std::to_string(arity) + " argument(s)");
  std::vector<double> args;
  for (size_t i = 1; i < cfg.eval.size(); ++i) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(cfg.eval[i], &used));
      if (used != cfg.eval[i].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError("argument '" + cfg.eval[i] + "' is not a number");
    }
  }
  double value = 0.0, bound = 0.0;
  check(expint_eval(name.c_str(), args.data(), args.size(), &value));
  check(expint_eval_error_bound(name.c_str(), args.data(), args.size(), &bound));
  char buf[128];
  if (cfg.format == "machine") {
    std::snprintf(buf, sizeof buf, "{\"function\":\"%s\",\"value\":%.17g,\"error_bound\":%.3g}\n", name.c_str(), value,
                  bound);
  } else {
    std::snprintf(buf, sizeof buf, "%s = %.17g  (error bound %.3g)\n", name.c_str(), value, bound);
  }
  std::cout << buf;
  return kExitPass;
}

int run_manifest(const Config& cfg) {
  std::ifstream in(cfg.manifest);
  if (!in) throw UsageError("cannot read manifest '" + cfg.manifest + "'");
  std::stringstream text;
  text << in.rdbuf();
  const OptionsPtr opts = make_options(cfg);
  expint_run* raw = nullptr;
  check(expint_martingale_manifest(text.str().c_str(), opts.get(), &raw));
  const RunPtr run(raw);
  return emit(run.get(), cfg);
}

void add_common(CLI::App* sub, Config& cfg) {
  sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--samples", cfg.samples, "Override the main sample count of the suite")
      ->check(CLI::PositiveNumber);
  sub->add_option("--nodes", cfg.nodes, "Gauss-Hermite nodes for the heat semigroup")
      ->check(CLI::Range(8, 512))
      ->capture_default_str();
  sub->add_option("--depth", cfg.depth, "Maximum martingale depth (cap 16)")->capture_default_str();
  sub->add_option("--tol", cfg.tolerances, "Override a tolerance, name=value (repeatable)");
  sub->add_option("--out", cfg.out, "Write reports to this file instead of stdout");
  sub->add_option("--format", cfg.format, "Report format")
      ->check(CLI::IsMember({"human", "machine"}))
      ->capture_default_str();
  sub->add_option("--jobs", cfg.jobs, "Worker threads (default: EXPINT_JOBS or all cores)")
      ->envname("EXPINT_JOBS")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--timing", cfg.timing, "Include elapsed_ms in reports");
  sub->add_option("--export-dir", cfg.export_dir, "Write plot-ready traces and tables here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for exponential integrability inequalities", "expint-lab"};
  app.set_version_flag("--version", expint_version());
  app.require_subcommand(1);
  Config cfg;

  auto* kernel = app.add_subcommand("kernel", "Kernel and special-function checks, evaluation and table export");
  add_common(kernel, cfg);
  kernel->add_option("--eval", cfg.eval, "Evaluate a function: NAME ARG [ARG]")->expected(2, 3);
  kernel->add_option("--export-table", cfg.export_table, "Write the F or G table to --out")
      ->check(CLI::IsMember({"F", "G"}));

  auto* martingale = app.add_subcommand("martingale", "Dyadic martingale and Bellman induction checks");
  add_common(martingale, cfg);
  martingale->add_option("--manifest", cfg.manifest, "Check trees listed as 'depth seed law' lines");
  martingale->add_option("--brownian-paths", cfg.brownian_paths, "Paths in the Brownian cross-check")
      ->check(CLI::Range(uint64_t{2}, uint64_t{100000000}));

  std::vector<CLI::App*> plain;
  plain.push_back(app.add_subcommand("verify", "Pointwise inequality checks"));
  plain.push_back(app.add_subcommand("flow", "Heat-flow monotonicity, endpoint chain and sharpness"));
  plain.push_back(app.add_subcommand("scan", "Exploratory scans; never gate"));
  plain.push_back(app.add_subcommand("all", "Every suite"));
  for (auto* sub : plain) add_common(sub, cfg);
  plain.back()
      ->add_option("--brownian-paths", cfg.brownian_paths, "Paths in the Brownian cross-check")
      ->check(CLI::Range(uint64_t{2}, uint64_t{100000000}));

  if (argc > 1 && argv[1][0] != '-' && !expint_is_suite(argv[1])) {
    std::cerr << "error: unknown subcommand '" << argv[1] << "'\n" << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  const std::string suite = app.get_subcommands().front()->get_name();
  try {
    if (suite == "kernel" && !cfg.eval.empty()) return run_eval(cfg);
    if (suite == "kernel" && !cfg.export_table.empty()) {
      if (cfg.out.empty()) throw UsageError("--export-table needs --out");
      check(expint_table_export(cfg.export_table.c_str(), cfg.out.c_str()));
      return kExitPass;
    }
    if (suite == "martingale" && !cfg.manifest.empty()) return run_manifest(cfg);
    return run_suite(suite, cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.get_subcommands().front()->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
