#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tsvolterra/calculus.hpp"
#include "tsvolterra/convolution.hpp"
#include "tsvolterra/errors.hpp"
#include "tsvolterra/expr.hpp"
#include "tsvolterra/numeric.hpp"
#include "tsvolterra/second_kind.hpp"
#include "tsvolterra/time_scale.hpp"

using namespace tsvolterra;
namespace ex = tsvolterra::expr;

TEST_CASE("shift on the integers is translation") {
  auto ts = share(TimeScale::uniform(0.0, 6.0, 1.0));
  auto f = GridFunction::sample(ts, [](double t) { return t * t; });
  auto sh = shift(f);
  CHECK(sh.max_stencil_residual <= 1e-12);
  CHECK(sh.values.at(5, 2) == 9.0);
  for (std::size_t i = 0; i < ts->size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double d = static_cast<double>(i) - static_cast<double>(j);
      CHECK(sh.values.at(i, j) == d * d);
    }
}

TEST_CASE("shift stencil on an uneven grid") {
  auto ts = share(TimeScale::from_points({0.0, 1.0, 3.0, 4.0}));
  std::vector<double> fv{0.5, -1.25, 2.0, 0.75};
  auto sh = shift(GridFunction(ts, fv));
  // column 0 is f itself, the diagonal pins f(a)
  for (std::size_t i = 0; i < 4; ++i) CHECK(sh.values.at(i, 0) == fv[i]);
  for (std::size_t j = 1; j < 4; ++j) CHECK(sh.values.at(j, j) == fv[0]);
  // one step of the stencil per column, worked by hand
  CHECK(sh.values.at(2, 1) == 2.0 * fv[1] - fv[0]);  // -3.0
  CHECK(sh.values.at(3, 1) == fv[2]);
  CHECK(sh.values.at(3, 2) == fv[1]);
  CHECK(sh.max_stencil_residual <= 1e-12);
}

TEST_CASE("shift of an exponential stays exponential") {
  auto ts = share(TimeScale::from_points({0.0, 0.5, 1.25, 3.0, 4.1}));
  for (double lambda : {0.5, 1.0}) {
    auto f = GridFunction::sample(
        ts, [&](double t) { return exp_constant(*ts, lambda, t, ts->a()); });
    auto sh = shift(f);
    for (std::size_t i = 0; i < ts->size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        CHECK(approx_equal(sh.values.at(i, j), exp_constant(*ts, lambda, (*ts)[i], (*ts)[j]),
                           1e-10));
  }
}

TEST_CASE("convolving two unit functions integrates to h_1") {
  auto ts = share(TimeScale::uniform(0.0, 5.0, 1.0));
  auto one = GridFunction::constant(ts, 1.0);
  auto conv = convolution(one, one);
  CHECK(conv.forms_gap <= 1e-12);
  CHECK(conv.values.values() == std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
}

TEST_CASE("convolution forms agree on random data") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> count_d(2, 12);
  std::uniform_real_distribution<double> gap_d(0.1, 1.2);
  std::uniform_real_distribution<double> start_d(-2.0, 2.0);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int inst = 0; inst < 100; ++inst) {
    std::size_t n = count_d(rng);
    std::vector<double> pts{start_d(rng)};
    for (std::size_t i = 1; i < n; ++i) pts.push_back(pts.back() + gap_d(rng));
    auto ts = share(TimeScale::from_points(std::move(pts)));
    std::vector<double> fv(n), gv(n);
    for (auto& v : fv) v = val(rng);
    for (auto& v : gv) v = val(rng);
    auto conv = convolution(GridFunction(ts, fv), GridFunction(ts, gv));
    CHECK(conv.forms_gap <= 1e-10 * (1.0 + conv.values.max_abs()));
    CHECK(conv.values[0] == 0.0);
  }
}

TEST_CASE("convolution requires a common grid") {
  auto ts1 = share(TimeScale::uniform(0.0, 3.0, 1.0));
  auto ts2 = share(TimeScale::uniform(0.0, 4.0, 1.0));
  auto f = GridFunction::constant(ts1, 1.0);
  auto g = GridFunction::constant(ts2, 1.0);
  CHECK_THROWS_AS(convolution(f, g), Error);
  try {
    convolution(f, g);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridMismatch);
  }
}

TEST_CASE("convolution-kernel problem materializes the shifted kernel") {
  auto ts = share(TimeScale::uniform(0.0, 5.0, 1.0));
  auto p = convolution_problem(ts, 1.0, ex::parse("t"), ex::parse("1"));
  // khat(t, sigma(s)) = t - s - 1 on the integers; the diagonal is unused
  CHECK(p.kernel.at(3, 0) == 2.0);
  CHECK(p.kernel.at(3, 2) == 0.0);
  CHECK(p.kernel.at(2, 2) == 0.0);
  CHECK(p.lambda == 1.0);
  CHECK(p.forcing.values() == std::vector<double>(6, 1.0));
}

TEST_CASE("trigonometric convolution equation") {
  auto ts = share(TimeScale::uniform(0.0, 8.0, 1.0));
  auto p = convolution_problem(ts, 2.0, ex::parse("cos1(t,0)"), ex::parse("sin1(t,0)"));
  auto rep = solve_direct(p);
  for (std::size_t i = 0; i < ts->size(); ++i) {
    double t = (*ts)[i];
    CHECK(approx_equal(rep.phi()[i], t * std::ldexp(1.0, static_cast<int>(t) - 1), 1e-10));
  }

  // the same equation phrased with an explicit two-variable kernel
  auto p2 = ProblemSpec::from_exprs(ts, 2.0, ex::parse("cos1(t,sigma(s))"),
                                    ex::parse("sin1(t,0)"));
  auto rep2 = solve_direct(p2);
  for (std::size_t i = 0; i < ts->size(); ++i)
    CHECK(approx_equal(rep.phi()[i], rep2.phi()[i], 1e-12));
}
