#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "cqcd/asymptotics.hpp"
#include "cqcd/commands.hpp"
#include "cqcd/errors.hpp"
#include "cqcd/experiment.hpp"
#include "cqcd/special_functions.hpp"

using namespace cqcd;

namespace {

const char* kFull = R"({
  "name": "critical_mean",
  "schedule": {"family": "gaussian_mean", "c": 1, "delta": 0.5},
  "gammas": [100, 1000, 10000],
  "mc": {"replications": 2000, "seed": 7, "cap": 0, "workers": 2},
  "outputs": "out",
  "rho": 0.5,
  "validation": {"calibration_tol": 0.05, "at2fa_tol": 0.1, "add_tol": 0.1}
})";

std::string error_of(const std::string& text) {
  try {
    parse_experiment(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

std::string header_of(const CsvTable& t) {
  std::ostringstream out;
  CsvTable only{t.header, {}};
  only.write(out);
  return out.str();
}

}  // namespace

TEST_CASE("parse a full experiment") {
  const auto spec = parse_experiment(kFull);
  CHECK(spec.name == "critical_mean");
  CHECK(spec.schedule.family == AdversarySchedule::Family::GaussianMean);
  CHECK(spec.gammas.size() == 3);
  CHECK(spec.mc.seed == 7);
  CHECK(spec.mc.workers == 2);
  REQUIRE(spec.rho);
  CHECK(*spec.rho == 0.5);
  CHECK(spec.mc_at(1000.0).cap == 100000);
}

TEST_CASE("defaults for optional sections") {
  const auto spec = parse_experiment(
      R"({"name": "a", "schedule": {"family": "exponential_rate", "c": 1, "delta": 0.5}, "gammas": [10]})");
  CHECK(spec.mc.replications == 2000);
  CHECK(spec.mc.cap == 0);
  CHECK(spec.mc.workers == 1);
  CHECK_FALSE(spec.rho);
  CHECK(spec.validation == ValidationTolerances{});
  CHECK(spec.schedule.sign == 1);
  CHECK(spec.schedule.lambda == 1.0);
}

TEST_CASE("round trip is a fixed point") {
  const char* docs[] = {
      kFull,
      R"({"name": "exp-1", "schedule": {"family": "exponential_rate", "c": 0.3, "delta": 0.75, "sign": -1,
          "lambda": 2.5}, "gammas": [1.5, 3.25e7], "mc": {"seed": 18446744073709551615, "cap": 17}})",
      R"({"name": "v", "schedule": {"family": "gaussian_variance", "c": 0.1, "delta": 1}, "gammas": [2],
          "validation": {"add_tol": 0.3}})",
  };
  for (const char* doc : docs) {
    const auto first = parse_experiment(doc);
    const auto text = emit_experiment(first);
    const auto second = parse_experiment(text);
    CHECK(first == second);
    CHECK(emit_experiment(second) == text);
  }
}

TEST_CASE("syntax errors carry line and column") {
  const auto msg = error_of("{\n  \"name\": \"a\",\n  \"gammas\": [1,,2]\n}");
  CHECK(contains(msg, "line 3"));
  CHECK(contains(msg, "column 16"));
}

TEST_CASE("schema errors name the key and its line") {
  const std::string base = "{\n\"name\": \"a\",\n\"schedule\": {\"family\": \"gaussian_mean\", \"c\": 1, \"delta\": 0.5},\n";
  CHECK(contains(error_of(base + "\"gammas\": []\n}"), "gammas"));
  CHECK(contains(error_of(base + "\"gammas\": []\n}"), "line 4"));
  CHECK(contains(error_of(base + "\"gammas\": [10, 5]\n}"), "strictly increasing"));
  CHECK(contains(error_of(base + "\"gammas\": [1]\n}"), "exceed 1"));
  CHECK(contains(error_of(base + "\"gammas\": [10],\n\"bogus\": 1\n}"), "bogus: unknown key (line 5)"));
  CHECK(contains(error_of(base + "\"gammas\": [10],\n\"rho\": 1\n}"), "rho"));
  CHECK(contains(error_of(base + "\"gammas\": [10],\n\"mc\": {\"workers\": 0}\n}"), "mc.workers"));
  CHECK(contains(error_of(base + "\"gammas\": [10],\n\"mc\": {\"replications\": -3}\n}"), "mc.replications"));
  CHECK(contains(error_of(base + "\"gammas\": \"x\"\n}"), "gammas"));
  CHECK(contains(error_of(R"({"name": "Bad Name", "schedule": {"family": "gaussian_mean", "c": 1, "delta": 0.5},
      "gammas": [10]})"), "name"));
  CHECK(contains(error_of(R"({"name": "a", "schedule": {"family": "poisson", "c": 1, "delta": 0.5},
      "gammas": [10]})"), "schedule.family"));
  CHECK(contains(error_of(R"({"name": "a", "schedule": {"family": "gaussian_mean", "c": -1, "delta": 0.5},
      "gammas": [10]})"), "schedule"));
  CHECK(contains(error_of(R"({"name": "a", "schedule": {"family": "gaussian_mean", "c": 1, "delta": 0.5,
      "sign": -1}, "gammas": [10]})"), "schedule.sign"));
  CHECK(contains(error_of(R"({"schedule": {"family": "gaussian_mean", "c": 1, "delta": 0.5}, "gammas": [10]})"),
                 "name: missing required key"));
}

TEST_CASE("load_experiment reports missing files") {
  CHECK_THROWS_AS(load_experiment("/nonexistent/cqcd.json"), ConfigError);
}

TEST_CASE("csv formatting") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_real(M_PI)) == M_PI);
  CHECK(format_real(100) == "100");
  std::ostringstream out;
  CsvTable{{"a", "b"}, {{"1", "x"}, {"2", "y"}}}.write(out);
  CHECK(out.str() == "a,b\n1,x\n2,y\n");
}

TEST_CASE("predict golden header and critical row") {
  auto spec = parse_experiment(kFull);
  spec.gammas = {1e4};
  spec.rho.reset();
  const auto r = cmd_predict(spec);
  CHECK(header_of(r.table) ==
        "gamma,family,c,delta,d_pre_post,d_post_pre,divergence_ratio,regime,regime_y,h_star,n_gamma,"
        "n_gamma_over_gamma,lorden_baseline,damage\n");
  REQUIRE(r.table.rows.size() == 1);
  const auto& row = r.table.rows[0];
  CHECK(row[7] == "critical");
  CHECK(std::stod(row[8]) == doctest::Approx(0.5).epsilon(1e-12));
  const double ratio = std::stod(row[6]);
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-3));
  const double expected = 1e4 * (g_mapping(0.5) / 0.5) * ratio;
  CHECK(std::stod(row[10]) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(row[13].empty());
}

TEST_CASE("predict deep covert exponential row") {
  const auto spec = parse_experiment(
      R"({"name": "deep", "schedule": {"family": "exponential_rate", "c": 1, "delta": 1}, "gammas": [10000],
          "rho": 0.5})");
  const auto r = cmd_predict(spec);
  REQUIRE(r.table.rows.size() == 1);
  CHECK(r.table.rows[0][7] == "deep_covert");
  CHECK(std::stod(r.table.rows[0][11]) > 0.0);
  CHECK_FALSE(r.table.rows[0][13].empty());
}

TEST_CASE("validate and overshoot golden headers") {
  auto spec = parse_experiment(
      R"({"name": "tiny", "schedule": {"family": "exponential_rate", "c": 1, "delta": 0.5}, "gammas": [20],
          "mc": {"replications": 200, "seed": 3}})");
  const auto v = cmd_validate(spec);
  CHECK(header_of(v.table) ==
        "gamma,h_asymptotic,h_calibrated,h_gap_rel,at2fa_cal_mean,at2fa_cal_se,at2fa_asym_mean,at2fa_asym_se,"
        "at2fa_gap_rel,add_mean,add_se,n_gamma,add_gap_rel,sup_upper_pre,inf_lower_pre,sup_upper_post,"
        "inf_lower_post,truncated,pass,wall_clock_s\n");
  CHECK(v.table.rows.size() == 1);
  const auto o = cmd_overshoot(spec);
  CHECK(header_of(o.table) ==
        "gamma,hyp,sup_upper,inf_lower,method_upper,method_lower,b,mc_upper_mean,mc_upper_se,mc_upper_hits,"
        "mc_lower_mean,mc_lower_se,mc_lower_hits,pass\n");
  CHECK(o.table.rows.size() == 2);
}

TEST_CASE("validate output is independent of the worker count") {
  auto spec = parse_experiment(
      R"({"name": "tiny", "schedule": {"family": "gaussian_mean", "c": 1, "delta": 0.5}, "gammas": [20, 40],
          "mc": {"replications": 200, "seed": 3, "workers": 1}})");
  auto strip = [](CsvTable t) {
    for (auto& row : t.rows) row.pop_back();
    return t.rows;
  };
  const auto one = strip(cmd_validate(spec).table);
  spec.mc.workers = 8;
  CHECK(one == strip(cmd_validate(spec).table));
  spec.mc.seed = 4;
  CHECK(one != strip(cmd_validate(spec).table));
}
