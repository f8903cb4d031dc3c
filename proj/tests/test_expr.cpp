#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "tsvolterra/errors.hpp"
#include "tsvolterra/expr.hpp"
#include "tsvolterra/numeric.hpp"
#include "tsvolterra/time_scale.hpp"

using namespace tsvolterra;
namespace ex = tsvolterra::expr;

namespace {
ex::EvalEnv env_on(TimeScalePtr ts, double t, double s) {
  ex::EvalEnv env;
  env.scale = std::move(ts);
  env.t = t;
  env.s = s;
  return env;
}
}  // namespace

TEST_CASE("arithmetic parsing and evaluation") {
  ex::EvalEnv env;
  CHECK(ex::evaluate(ex::parse("1+2*3^2"), env) == 19.0);
  CHECK(ex::evaluate(ex::parse("2-3-4"), env) == -5.0);
  CHECK(ex::evaluate(ex::parse("2/4/2"), env) == 0.25);
  // the exponent binds to the signed factor: -3^2 parses as (-3)^2
  CHECK(ex::evaluate(ex::parse("-3^2"), env) == 9.0);
  CHECK(ex::evaluate(ex::parse("0-3^2"), env) == -9.0);
  CHECK(ex::evaluate(ex::parse("(2-3)^2"), env) == 1.0);
  CHECK(ex::evaluate(ex::parse("1e-3"), env) == 1e-3);
  CHECK(ex::evaluate(ex::parse("abs(2-5)"), env) == 3.0);
}

TEST_CASE("grid builtins evaluate against the scale") {
  auto z5 = share(TimeScale::uniform(0.0, 5.0, 1.0));
  CHECK(ex::evaluate(ex::parse("2*hk(1,t,sigma(s))"), env_on(z5, 3.0, 1.0)) == 2.0);

  auto gap = share(TimeScale::from_points({0.0, 1.0, 3.0}));
  CHECK(ex::evaluate(ex::parse("e(1,t,s)"), env_on(gap, 3.0, 0.0)) == 6.0);
  CHECK(ex::evaluate(ex::parse("mu(t)"), env_on(gap, 1.0, 0.0)) == 2.0);
  CHECK(ex::evaluate(ex::parse("sigma(t)"), env_on(gap, 1.0, 0.0)) == 3.0);
  CHECK(ex::evaluate(ex::parse("hk(2,t,s)"), env_on(gap, 3.0, 0.0)) == 2.0);

  auto z4 = share(TimeScale::uniform(0.0, 4.0, 1.0));
  CHECK(ex::evaluate(ex::parse("cos1(t,s)"), env_on(z4, 2.0, 0.0)) == 0.0);
  CHECK(ex::evaluate(ex::parse("sin1(t,s)"), env_on(z4, 2.0, 0.0)) == 2.0);
  CHECK(ex::evaluate(ex::parse("m(1,t,s)"), env_on(z4, 4.0, 0.0)) == 2.0);
}

TEST_CASE("syntax errors carry one-based byte offsets") {
  try {
    ex::parse("hk(1,t");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
    REQUIRE(e.offset().has_value());
    CHECK(*e.offset() == 7);
    CHECK(std::string(e.what()).find("offset 7") != std::string::npos);
  }

  try {
    ex::parse("1 + ");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
  }

  try {
    ex::parse("1 2");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(*e.offset() == 3);
  }
}

TEST_CASE("exponent restrictions") {
  CHECK_THROWS_AS(ex::parse("t^-2"), Error);
  CHECK_THROWS_AS(ex::parse("t^2.5"), Error);
  CHECK_THROWS_AS(ex::parse("t^s"), Error);
  CHECK(ex::evaluate(ex::parse("2^10"), ex::EvalEnv{}) == 1024.0);
  CHECK(ex::evaluate(ex::parse("2^0"), ex::EvalEnv{}) == 1.0);
}

TEST_CASE("unknown names and arity mismatches") {
  try {
    ex::parse("foo(1)");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownFunction);
    CHECK(*e.offset() == 1);
  }
  try {
    ex::parse("sigma(1,2)");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadArity);
  }
  try {
    ex::parse("y+1");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownFunction);
  }
}

TEST_CASE("unbound variables and domain errors surface at evaluation") {
  ex::EvalEnv empty;
  CHECK_THROWS_AS(ex::evaluate(ex::parse("x"), empty), Error);
  try {
    ex::evaluate(ex::parse("t"), empty);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnboundVariable);
  }
  CHECK_THROWS_AS(ex::evaluate(ex::parse("1/0"), empty), Error);
  CHECK_THROWS_AS(ex::evaluate(ex::parse("sigma(1)"), empty), Error);  // no scale bound
  CHECK_THROWS_AS(ex::evaluate(ex::parse("hk(1/2,1,0)"),
                               env_on(share(TimeScale::uniform(0.0, 2.0, 1.0)), 1.0, 0.0)),
                  Error);
}

TEST_CASE("builder interface matches parsed trees") {
  using namespace tsvolterra::expr;
  Expr built = binary(BinOp::Add, number(1.0), binary(BinOp::Mul, number(2.0), variable(Var::T)));
  CHECK(built == parse("1+2*t"));
  CHECK_FALSE(built == parse("1+2*s"));
  Expr p = power(variable(Var::X), 3);
  CHECK(p == parse("x^3"));
  Expr c = call(Builtin::Hk, {number(1.0), variable(Var::T), number(0.0)});
  CHECK(c == parse("hk(1,t,0)"));
}

namespace {

ex::Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
  std::uniform_real_distribution<double> num(0.0, 9.5);
  std::uniform_int_distribution<int> var_pick(0, 2);
  std::uniform_int_distribution<int> op_pick(0, 3);
  std::uniform_int_distribution<unsigned> exp_pick(0, 3);
  switch (pick(rng)) {
    case 0: return ex::number(num(rng));
    case 1: {
      const ex::Var vars[3] = {ex::Var::T, ex::Var::S, ex::Var::X};
      return ex::variable(vars[var_pick(rng)]);
    }
    case 2: return ex::negate(random_expr(rng, depth - 1));
    case 3: {
      const ex::BinOp ops[4] = {ex::BinOp::Add, ex::BinOp::Sub, ex::BinOp::Mul, ex::BinOp::Div};
      return ex::binary(ops[op_pick(rng)], random_expr(rng, depth - 1),
                        random_expr(rng, depth - 1));
    }
    case 4: return ex::power(random_expr(rng, depth - 1), exp_pick(rng));
    case 5: return ex::call(ex::Builtin::Sigma, {random_expr(rng, depth - 1)});
    default:
      return ex::call(ex::Builtin::Hk,
                      {ex::number(1.0), random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
  }
}

}  // namespace

TEST_CASE("printer round-trips through the parser") {
  CHECK(ex::parse("2*hk(1,t,sigma(s))").text() == "(2*hk(1,t,sigma(s)))");
  std::mt19937_64 rng(424242);
  for (int i = 0; i < 1000; ++i) {
    ex::Expr e = random_expr(rng, 4);
    std::string printed = e.text();
    ex::Expr back = ex::parse(printed);
    CHECK(back == e);
    CHECK(back.text() == printed);
  }
}
