#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <expint/expint.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

TEST_CASE("evaluation by name") {
  double v = 0.0;
  const double x0 = 0.0;
  REQUIRE(expint_eval("inv_mills", &x0, 1, &v) == EXPINT_OK);
  CHECK(v == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-15));
  const double pt[2] = {3.0, 16.0};
  REQUIRE(expint_eval("N_sup", pt, 2, &v) == EXPINT_OK);
  CHECK(v == doctest::Approx(std::log(5.0)).epsilon(1e-15));
  CHECK(expint_function_arity("M") == 2);
  CHECK(expint_function_arity("nope") == 0);
}

TEST_CASE("F(2) with an error bound") {
  const double x = 2.0;
  double v = 0.0, err = 0.0;
  REQUIRE(expint_eval("F", &x, 1, &v) == EXPINT_OK);
  REQUIRE(expint_eval_error_bound("F", &x, 1, &err) == EXPINT_OK);
  CHECK(v == doctest::Approx(7.2287953259232647599).epsilon(1e-10));
  CHECK(err > 0.0);
  CHECK(err < 1e-8);
}

TEST_CASE("errors map to status codes") {
  double v = 0.0;
  const double neg = -1.0, nan = std::nan(""), big = 100.0, one[2] = {100.0, 1.0};
  CHECK(expint_eval("nope", &neg, 1, &v) == EXPINT_ERR_INVALID_ARGUMENT);
  CHECK(std::string(expint_last_error()).find("nope") != std::string::npos);
  CHECK(expint_eval("F", one, 2, &v) == EXPINT_ERR_INVALID_ARGUMENT);
  CHECK(expint_eval("G", &neg, 1, &v) == EXPINT_ERR_DOMAIN);
  CHECK(expint_eval("k", &nan, 1, &v) == EXPINT_ERR_DOMAIN);
  CHECK(expint_eval("F", &big, 1, &v) == EXPINT_ERR_RANGE);
  CHECK(std::string(expint_last_error()).find("[0, 40]") != std::string::npos);
  CHECK(expint_eval("F", &neg, 1, &v) == EXPINT_ERR_DOMAIN);
  CHECK(expint_eval("bound_rhs", one, 2, &v) == EXPINT_ERR_RANGE);
  REQUIRE(expint_eval("k", &neg, 1, &v) == EXPINT_OK);
  CHECK(std::string(expint_last_error()).empty());
  CHECK(std::string(expint_status_string(EXPINT_ERR_RESOURCE)) == "resource error");
}

TEST_CASE("last error is per thread") {
  double v = 0.0;
  const double neg = -1.0;
  CHECK(expint_eval("G", &neg, 1, &v) == EXPINT_ERR_DOMAIN);
  std::string other = "unset";
  std::thread([&] { other = expint_last_error(); }).join();
  CHECK(other.empty());
  CHECK_FALSE(std::string(expint_last_error()).empty());
}

TEST_CASE("options validation") {
  expint_options* o = nullptr;
  REQUIRE(expint_options_create(&o) == EXPINT_OK);
  CHECK(expint_options_set_tolerance(o, "det", 1e-6) == EXPINT_OK);
  double t = 0.0;
  CHECK(expint_options_get_tolerance(o, "det", &t) == EXPINT_OK);
  CHECK(t == 1e-6);
  CHECK(expint_options_set_tolerance(o, "no_such_tolerance", 1.0) == EXPINT_ERR_INVALID_ARGUMENT);
  CHECK(expint_options_set_tolerance(o, "det", -1.0) == EXPINT_ERR_INVALID_ARGUMENT);
  CHECK(expint_options_set_jobs(o, 0) == EXPINT_ERR_INVALID_ARGUMENT);
  CHECK(expint_options_set_depth(o, 17) == EXPINT_ERR_RESOURCE);
  CHECK(expint_options_set_nodes(o, 4) == EXPINT_ERR_INVALID_ARGUMENT);
  CHECK(std::string(expint_tolerance_names()).find("four_point") != std::string::npos);
  CHECK(expint_default_jobs() >= 1);
  expint_options_destroy(o);
  expint_options_destroy(nullptr);
}

TEST_CASE("suite runs and report access") {
  expint_options* o = nullptr;
  REQUIRE(expint_options_create(&o) == EXPINT_OK);
  expint_options_set_samples(o, 2000);
  expint_run* run = nullptr;
  CHECK(expint_run_suite("bogus", o, &run) == EXPINT_ERR_INVALID_ARGUMENT);
  CHECK(expint_is_suite("scan") == 1);
  CHECK(expint_is_suite("bogus") == 0);
  REQUIRE(expint_run_suite("scan", o, &run) == EXPINT_OK);
  CHECK(expint_run_passed(run) == 1);
  REQUIRE(expint_run_report_count(run) == 2);
  expint_report_info info{};
  REQUIRE(expint_run_report_info(run, 0, &info) == EXPINT_OK);
  CHECK(std::string(info.check_name) == "four_point_M");
  CHECK(info.gating == 0);
  CHECK(expint_run_report_info(run, 9, &info) == EXPINT_ERR_INVALID_ARGUMENT);
  const char* text = nullptr;
  REQUIRE(expint_run_report_text(run, 0, EXPINT_FORMAT_MACHINE, 0, &text) == EXPINT_OK);
  const std::string first = text;
  REQUIRE(expint_run_report_text(run, 1, EXPINT_FORMAT_RECORD, 0, &text) == EXPINT_OK);
  CHECK(first.front() == '{');
  CHECK(first.find("\"elapsed_ms\":null") != std::string::npos);
  expint_run_destroy(run);
  expint_options_destroy(o);
}

TEST_CASE("martingales through handles") {
  expint_martingale* m = nullptr;
  const double leaves[2] = {1.5, 0.5};
  REQUIRE(expint_martingale_from_leaves(leaves, 2, &m) == EXPINT_OK);
  CHECK(expint_martingale_depth(m) == 1);
  double qv[2] = {0, 0};
  CHECK(expint_martingale_quadratic_variation(m, qv, 2) == 2);
  CHECK(qv[0] == 0.25);
  char* text = nullptr;
  REQUIRE(expint_martingale_serialize(m, &text) == EXPINT_OK);
  expint_martingale* back = nullptr;
  REQUIRE(expint_martingale_parse(text, &back) == EXPINT_OK);
  expint_string_free(text);
  double out[2] = {0, 0};
  CHECK(expint_martingale_leaves(back, out, 2) == 2);
  CHECK(out[0] == 1.5);
  CHECK(out[1] == 0.5);
  expint_run* run = nullptr;
  REQUIRE(expint_martingale_check(back, nullptr, &run) == EXPINT_OK);
  CHECK(expint_run_report_count(run) == 5);
  CHECK(expint_run_passed(run) == 1);
  expint_run_destroy(run);
  expint_martingale_destroy(back);
  expint_martingale_destroy(m);

  CHECK(expint_martingale_random(17, 1, "lognormal_leaves", &m) == EXPINT_ERR_RESOURCE);
  CHECK(expint_martingale_random(3, 1, "uniform", &m) == EXPINT_ERR_FORMAT);
  CHECK(expint_martingale_parse("2\n1 2\n", &m) == EXPINT_ERR_FORMAT);
  REQUIRE(expint_martingale_random(4, 2, "bounded_ratio", &m) == EXPINT_OK);
  CHECK(expint_martingale_leaf_count(m) == 16);
  expint_martingale_destroy(m);

  REQUIRE(expint_martingale_manifest("3 1 lognormal_leaves\n4 2 bounded_ratio\n", nullptr, &run) == EXPINT_OK);
  CHECK(expint_run_passed(run) == 1);
  expint_run_destroy(run);
}

TEST_CASE("table export") {
  const std::string path = "capi_table_G.txt";
  REQUIRE(expint_table_export("G", path.c_str()) == EXPINT_OK);
  std::ifstream in(path);
  CHECK(in.good());
  std::remove(path.c_str());
  CHECK(expint_table_export("H", path.c_str()) == EXPINT_ERR_INVALID_ARGUMENT);
  CHECK(expint_table_export("F", "/nonexistent/dir/t.txt") == EXPINT_ERR_IO);
}
