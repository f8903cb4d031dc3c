#include <doctest.h>

#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsvolterra/errors.hpp"
#include "tsvolterra/problem_file.hpp"
#include "tsvolterra/report_io.hpp"

using namespace tsvolterra;

namespace {

const char* kGeometric = R"json({
  "schema_version": 1,
  "kind": "second",
  "timescale": {"type": "uniform", "start": 0, "stop": 10, "step": 1},
  "lambda": 1, "kernel": "1", "forcing": "1"
})json";

std::string geometric_candidate(bool tamper = false) {
  std::string csv = "t,phi\n";
  double v = 1.0;
  for (int t = 0; t <= 10; ++t) {
    csv += format_double(t) + "," + format_double(tamper && t == 7 ? v + 0.25 : v) + "\n";
    v *= 2.0;
  }
  return csv;
}

}  // namespace

TEST_CASE("format_double emits shortest round-trip forms") {
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-1.25) == "-1.25");
  double third = 1.0 / 3.0;
  CHECK(std::strtod(format_double(third).c_str(), nullptr) == third);
  double awkward = 0.1 + 0.2;
  CHECK(std::strtod(format_double(awkward).c_str(), nullptr) == awkward);
}

TEST_CASE("solve_loaded dispatches every method of a second-kind problem") {
  auto p = load_problem_text(kGeometric);
  auto direct = solve_loaded(p, Method::Direct);
  for (Method m : {Method::Neumann, Method::Picard, Method::Resolvent}) {
    auto rep = solve_loaded(p, m);
    for (std::size_t i = 0; i < direct.phi().size(); ++i)
      CHECK(rep.phi()[i] == doctest::Approx(direct.phi()[i]).epsilon(1e-12));
  }
}

TEST_CASE("solve_loaded enforces the per-kind method sets") {
  auto first = load_problem_text(R"json({
    "schema_version": 1, "kind": "first",
    "timescale": {"type": "uniform", "start": 0, "stop": 6, "step": 1},
    "kernel": "cos1(t,sigma(s))", "forcing": "hk(1,t,0)"
  })json");
  CHECK_THROWS_AS(solve_loaded(first, Method::Neumann), Error);

  auto sys = load_problem_text(R"json({
    "schema_version": 1, "kind": "system",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 1, "kernels": [["1"]], "forcings": ["1"]
  })json");
  CHECK_THROWS_AS(solve_loaded(sys, Method::Picard), Error);
  CHECK(solve_loaded(sys, Method::Direct).solution.size() == 1);

  auto nl = load_problem_text(R"json({
    "schema_version": 1, "kind": "nonlinear",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 1, "integrand": "x^2", "forcing": "1",
    "lipschitz_L": 100, "bound_M": 2500, "domain_alpha": 50
  })json");
  CHECK(solve_loaded(nl, Method::Direct).phi().values() ==
        std::vector<double>{1.0, 2.0, 6.0, 42.0});
  CHECK_THROWS_AS(solve_loaded(nl, Method::Resolvent), Error);
}

TEST_CASE("ivp reports carry the reconstructed derivative levels") {
  auto p = load_problem_text(R"json({
    "schema_version": 1, "kind": "ivp",
    "timescale": {"type": "uniform", "start": 0, "stop": 5, "step": 1},
    "order": 2, "p": ["0", "0"], "q": "2", "y0": [0, 0]
  })json");
  auto rep = solve_loaded(p, Method::Direct);
  CHECK(rep.method == "direct (ivp)");
  CHECK(rep.phi().values() == std::vector<double>{2.0, 2.0, 2.0, 2.0});
  REQUIRE(rep.auxiliary.size() == 2);
  CHECK(rep.auxiliary[0].name == "y_delta_0");
  CHECK(rep.auxiliary[0].first_index == 0);
  CHECK(rep.auxiliary[0].values.values() ==
        std::vector<double>{0.0, 0.0, 2.0, 6.0, 12.0, 20.0});
  CHECK(rep.auxiliary[1].name == "y_delta_1");
  CHECK(rep.auxiliary[1].values.values() == std::vector<double>{0.0, 2.0, 4.0, 6.0, 8.0});
  CHECK_THROWS_AS(solve_loaded(p, Method::Neumann), Error);
}

TEST_CASE("csv reports are stable and complete") {
  auto p = load_problem_text(kGeometric);
  auto rep = solve_loaded(p, Method::Direct);
  std::string csv = report_to_csv(rep);
  CHECK(csv.rfind("t,phi,residual\n", 0) == 0);
  CHECK(csv.find("\n3,8,0\n") != std::string::npos);
  CHECK(csv == report_to_csv(rep));
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 12);

  auto sys = load_problem_text(R"json({
    "schema_version": 1, "kind": "system",
    "timescale": {"type": "uniform", "start": 0, "stop": 2, "step": 1},
    "lambda": 1,
    "kernels": [["-2*e(2,t,sigma(s))", "1"], ["-1", "4*hk(1,t,sigma(s))"]],
    "forcings": ["1", "4*hk(1,t,0)"]
  })json");
  std::string sys_csv = report_to_csv(solve_loaded(sys, Method::Direct));
  CHECK(sys_csv.find("# component 0\n") != std::string::npos);
  CHECK(sys_csv.find("# component 1\n") != std::string::npos);
  CHECK(sys_csv.find("\n1,-1,0\n") != std::string::npos);
  CHECK(sys_csv.find("\n2,8,0\n") != std::string::npos);
}

TEST_CASE("resolvent csv walks the lower triangle") {
  auto p = load_problem_text(kGeometric);
  auto r = resolvent(*p.second);
  std::string csv = resolvent_to_csv(r.gamma);
  CHECK(csv.rfind("t,s,gamma\n", 0) == 0);
  CHECK(csv.find("\n4,0,8\n") != std::string::npos);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + 11 * 12 / 2);
}

TEST_CASE("json reports are deterministic and carry cross-method deltas") {
  auto p = load_problem_text(kGeometric);
  std::vector<SolveReport> reps;
  reps.push_back(solve_loaded(p, Method::Direct));
  reps.push_back(solve_loaded(p, Method::Resolvent));
  std::string text = report_to_json(p, reps);
  CHECK(text == report_to_json(p, reps));
  CHECK(text.back() == '\n');

  auto parsed = nlohmann::json::parse(text);
  CHECK(parsed["schema_version"] == 1);
  CHECK(parsed["problem"]["kind"] == "second");
  CHECK(parsed["problem"]["points"] == 11);
  REQUIRE(parsed["reports"].size() == 2);
  CHECK(parsed["reports"][0]["method"] == "direct");
  CHECK_FALSE(parsed["reports"][0].contains("max_delta_vs_first"));
  REQUIRE(parsed["reports"][1].contains("max_delta_vs_first"));
  CHECK(parsed["reports"][1]["max_delta_vs_first"].get<double>() <= 1e-9);
  CHECK(parsed["reports"][0]["components"][0]["phi"][3] == 8.0);

  auto ivp = load_problem_text(R"json({
    "schema_version": 1, "kind": "ivp",
    "timescale": {"type": "uniform", "start": 0, "stop": 5, "step": 1},
    "order": 1, "p": ["-1"], "q": "0", "y0": [1]
  })json");
  auto ivp_json = nlohmann::json::parse(report_to_json(ivp, {solve_loaded(ivp, Method::Direct)}));
  REQUIRE(ivp_json["reports"][0].contains("auxiliary"));
  CHECK(ivp_json["reports"][0]["auxiliary"][0]["name"] == "y_delta_0");
}

TEST_CASE("candidate verification accepts the exact solution") {
  auto p = load_problem_text(kGeometric);
  auto v = verify_candidate(p, geometric_candidate());
  CHECK(v.ok);
  CHECK(v.rows == 11);
  CHECK(v.max_residual <= v.tolerance);
}

TEST_CASE("candidate verification pinpoints a tampered row") {
  auto p = load_problem_text(kGeometric);
  auto v = verify_candidate(p, geometric_candidate(true));
  CHECK_FALSE(v.ok);
  CHECK(v.max_residual > 0.1);
  // the equation first sees the bad value at the tampered point itself
  CHECK(v.worst_point == 7.0);
}

TEST_CASE("candidate verification tolerates comments and extra columns") {
  auto p = load_problem_text(kGeometric);
  std::string csv = "# produced elsewhere\nt,phi\n";
  double v = 1.0;
  for (int t = 0; t <= 10; ++t) {
    csv += format_double(t) + "," + format_double(v) + ",extra\n";
    v *= 2.0;
  }
  CHECK(verify_candidate(p, csv).ok);
}

TEST_CASE("candidate verification rejects bad grids and bad rows") {
  auto p = load_problem_text(kGeometric);
  CHECK_THROWS_AS(verify_candidate(p, "t,phi\n0,1\n1,2\n"), Error);
  try {
    verify_candidate(p, "t,phi\n0,1\n1,2\n");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridMismatch);
  }

  std::string offgrid = geometric_candidate();
  offgrid.replace(offgrid.find("\n7,"), 3, "\n7.5,");
  CHECK_THROWS_AS(verify_candidate(p, offgrid), Error);

  try {
    verify_candidate(p, "t,phi\n0,1\nnot,a,number,row\n");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaError);
  }
}

TEST_CASE("first-kind candidates live on the shortened grid") {
  auto p = load_problem_text(R"json({
    "schema_version": 1, "kind": "first",
    "timescale": {"type": "uniform", "start": 0, "stop": 6, "step": 1},
    "kernel": "cos1(t,sigma(s))", "forcing": "hk(1,t,0)"
  })json");
  const double want[] = {1.0, 1.0, 2.0, 4.0, 7.0, 11.0};
  std::string csv;
  for (int i = 0; i < 6; ++i) csv += format_double(i) + "," + format_double(want[i]) + "\n";
  auto v = verify_candidate(p, csv);
  CHECK(v.ok);
  CHECK(v.rows == 6);
  // a candidate across the full grid no longer matches
  CHECK_THROWS_AS(verify_candidate(p, csv + "6,0\n"), Error);
}

TEST_CASE("nonlinear, ivp and system verification paths") {
  auto nl = load_problem_text(R"json({
    "schema_version": 1, "kind": "nonlinear",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 1, "integrand": "x^2", "forcing": "1",
    "lipschitz_L": 100, "bound_M": 2500, "domain_alpha": 50
  })json");
  CHECK(verify_candidate(nl, "0,1\n1,2\n2,6\n3,42\n").ok);
  CHECK_FALSE(verify_candidate(nl, "0,1\n1,2\n2,6\n3,41\n").ok);

  auto ivp = load_problem_text(R"json({
    "schema_version": 1, "kind": "ivp",
    "timescale": {"type": "uniform", "start": 0, "stop": 5, "step": 1},
    "order": 2, "p": ["0", "0"], "q": "2", "y0": [0, 0]
  })json");
  CHECK(verify_candidate(ivp, "0,2\n1,2\n2,2\n3,2\n").ok);

  auto sys = load_problem_text(R"json({
    "schema_version": 1, "kind": "system",
    "timescale": {"type": "uniform", "start": 0, "stop": 2, "step": 1},
    "lambda": 1, "kernels": [["1", "0"], ["0", "1"]], "forcings": ["1", "1"]
  })json");
  CHECK_THROWS_AS(verify_candidate(sys, "0,1\n1,2\n2,4\n"), Error);
  try {
    verify_candidate(sys, "0,1\n1,2\n2,4\n");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaError);
  }
}
