#include <doctest.h>

#include <string>

#include "tsvolterra/errors.hpp"
#include "tsvolterra/problem_file.hpp"

using namespace tsvolterra;

namespace {

Errc error_of(const std::string& text) {
  try {
    load_problem_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected the load to throw");
  return Errc::SchemaError;
}

}  // namespace

TEST_CASE("second-kind problem file") {
  auto p = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 10, "step": 1},
    "lambda": 1,
    "kernel": "1",
    "forcing": "1",
    "solver": {"method": "neumann", "tol": 1e-9, "max_terms": 3}
  })json");
  CHECK(p.kind == LoadedProblem::Kind::Second);
  CHECK(p.scale->size() == 11);
  REQUIRE(p.second.has_value());
  CHECK(p.second->lambda == 1.0);
  CHECK(p.second->kernel.at(5, 2) == 1.0);
  CHECK(p.options.method == Method::Neumann);
  CHECK(p.options.tolerance == 1e-9);
  CHECK(p.second->options.max_terms == 3);
  CHECK(std::string(kind_name(p.kind)) == "second");
}

TEST_CASE("first-kind problem file carries its tolerance") {
  auto p = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "first",
    "timescale": {"type": "uniform", "start": 0, "stop": 6, "step": 1},
    "kernel": "cos1(t,sigma(s))",
    "forcing": "hk(1,t,0)",
    "solver": {"tol": 1e-8}
  })json");
  CHECK(p.kind == LoadedProblem::Kind::First);
  REQUIRE(p.first.has_value());
  CHECK(p.first->tolerance == 1e-8);
}

TEST_CASE("nonlinear problem file") {
  auto p = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "nonlinear",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 1,
    "integrand": "x^2",
    "forcing": "1",
    "lipschitz_L": 100,
    "bound_M": 2500,
    "domain_alpha": 50,
    "solver": {"method": "picard", "picard_initial": "1+t"}
  })json");
  CHECK(p.kind == LoadedProblem::Kind::Nonlinear);
  REQUIRE(p.nonlinear.has_value());
  CHECK(p.nonlinear->lipschitz == 100.0);
  CHECK(p.nonlinear->bound == 2500.0);
  CHECK(p.nonlinear->alpha == 50.0);
  CHECK(p.nonlinear->picard_initial.has_value());
}

TEST_CASE("system problem file") {
  auto p = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "system",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 1,
    "kernels": [["1", "0"], ["-1", "t"]],
    "forcings": ["1", "t"]
  })json");
  CHECK(p.kind == LoadedProblem::Kind::System);
  REQUIRE(p.system.has_value());
  CHECK(p.system->dimension() == 2);
  CHECK(p.system->kernel[1][0].at(2, 0) == -1.0);
  CHECK(p.system->kernel[1][1].at(2, 0) == 2.0);
  CHECK(p.system->forcing[1].values() == std::vector<double>{0.0, 1.0, 2.0, 3.0});
}

TEST_CASE("ivp problem file with defaults and overrides") {
  auto p = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "ivp",
    "timescale": {"type": "uniform", "start": 0, "stop": 5, "step": 1},
    "order": 2,
    "p": ["0", "0"],
    "q": "2",
    "y0": [0, 0]
  })json");
  CHECK(p.kind == LoadedProblem::Kind::Ivp);
  REQUIRE(p.ivp.has_value());
  CHECK(p.ivp->order == 2);
  CHECK(p.ivp->initial_index == 0);
  CHECK(p.ivp->convention == LinearIVP::Convention::AtS);

  auto q = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "ivp",
    "timescale": {"type": "uniform", "start": 0, "stop": 5, "step": 1},
    "order": 1,
    "p": ["-1"],
    "q": "0",
    "y0": [1],
    "s": 1,
    "convention": "at_sigma_s"
  })json");
  CHECK(q.ivp->initial_index == 1);
  CHECK(q.ivp->convention == LinearIVP::Convention::AtSigmaS);
}

TEST_CASE("convolution problem file expands through the shift table") {
  auto p = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "convolution",
    "timescale": {"type": "uniform", "start": 0, "stop": 5, "step": 1},
    "lambda": 1,
    "kernel": "t",
    "forcing": "1"
  })json");
  CHECK(p.kind == LoadedProblem::Kind::Convolution);
  REQUIRE(p.second.has_value());
  CHECK(p.second->kernel.at(3, 0) == 2.0);
  CHECK(p.second->kernel.at(3, 2) == 0.0);
}

TEST_CASE("every generator builds its scale") {
  auto p = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "second",
    "timescale": {"type": "qscale", "q": 2, "start": 1, "count": 4},
    "lambda": 0, "kernel": "0", "forcing": "1"
  })json");
  CHECK(p.scale->points() == std::vector<double>{1.0, 2.0, 4.0, 8.0});

  auto u = load_problem_text(R"json({
    "schema_version": 1,
    "kind": "second",
    "timescale": {"type": "union", "parts": [
      {"type": "explicit", "points": [0, 2.5]},
      {"type": "uniform", "start": 0, "stop": 2, "step": 1}
    ]},
    "lambda": 0, "kernel": "0", "forcing": "1"
  })json");
  CHECK(u.scale->points() == std::vector<double>{0.0, 1.0, 2.0, 2.5});
}

TEST_CASE("schema version is checked first") {
  CHECK(error_of(R"json({"kind": "second"})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 2, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1"})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": "1", "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1"})json") == Errc::SchemaError);
}

TEST_CASE("unknown fields are rejected at every level") {
  // top level
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1", "extra": 1})json") == Errc::SchemaError);
  // inside the timescale
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1, "foo": 2},
    "lambda": 0, "kernel": "0", "forcing": "1"})json") == Errc::SchemaError);
  // inside the solver block
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1",
    "solver": {"threads": 4}})json") == Errc::SchemaError);
  // a field belonging to another kind
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1", "domain_alpha": 5})json") == Errc::SchemaError);
}

TEST_CASE("malformed json reports a byte offset") {
  try {
    load_problem_text("{\"schema_version\": 1,");
    FAIL("expected a parse failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaError);
    REQUIRE(e.offset().has_value());
    CHECK(*e.offset() > 0);
    CHECK(e.raw_message().find("malformed JSON") != std::string::npos);
  }
}

TEST_CASE("expression errors keep their kind, offset and gain a label") {
  try {
    load_problem_text(R"json({"schema_version": 1, "kind": "second",
      "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
      "lambda": 0, "kernel": "1+", "forcing": "1"})json");
    FAIL("expected a parse failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
    REQUIRE(e.offset().has_value());
    CHECK(*e.offset() == 3);
    CHECK(e.raw_message().find("kernel") != std::string::npos);
  }
}

TEST_CASE("method restrictions by kind") {
  CHECK(error_of(R"json({"schema_version": 1, "kind": "first",
    "timescale": {"type": "uniform", "start": 0, "stop": 6, "step": 1},
    "kernel": "cos1(t,sigma(s))", "forcing": "hk(1,t,0)",
    "solver": {"method": "neumann"}})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 1, "kind": "system",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 1, "kernels": [["1"]], "forcings": ["1"],
    "solver": {"method": "picard"}})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 1, "kind": "ivp",
    "timescale": {"type": "uniform", "start": 0, "stop": 5, "step": 1},
    "order": 1, "p": ["-1"], "q": "0", "y0": [1],
    "solver": {"method": "resolvent"}})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 1, "kind": "nonlinear",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 1, "integrand": "x", "forcing": "1",
    "lipschitz_L": 1, "bound_M": 10, "domain_alpha": 10,
    "solver": {"method": "neumann"}})json") == Errc::SchemaError);
}

TEST_CASE("solver values are validated") {
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1",
    "solver": {"tol": 0}})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1",
    "solver": {"max_terms": -2}})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1",
    "solver": {"max_iter": 2.5}})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1},
    "lambda": 0, "kernel": "0", "forcing": "1",
    "solver": {"method": "gauss"}})json") == Errc::SchemaError);
}

TEST_CASE("unknown kinds and scale types are rejected") {
  CHECK(error_of(R"json({"schema_version": 1, "kind": "heat",
    "timescale": {"type": "uniform", "start": 0, "stop": 3, "step": 1}})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 1, "kind": "second",
    "timescale": {"type": "cantor"},
    "lambda": 0, "kernel": "0", "forcing": "1"})json") == Errc::SchemaError);
  CHECK(error_of(R"json({"schema_version": 1, "kind": "ivp",
    "timescale": {"type": "uniform", "start": 0, "stop": 5, "step": 1},
    "order": 1, "p": ["-1"], "q": "0", "y0": [1],
    "convention": "middle"})json") == Errc::SchemaError);
}

TEST_CASE("missing problem files fail with a schema error") {
  try {
    load_problem_file("/nonexistent/really_not_there.json");
    FAIL("expected the open to fail");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaError);
    CHECK(e.raw_message().find("cannot open problem file") != std::string::npos);
  }
}
