#include <doctest.h>

#include <vector>

#include "tsvolterra/errors.hpp"
#include "tsvolterra/time_scale.hpp"

using namespace tsvolterra;

TEST_CASE("uniform grid construction and jump operators") {
  TimeScale ts = TimeScale::uniform(0.0, 5.0, 1.0);
  CHECK(ts.size() == 6);
  CHECK(ts.a() == 0.0);
  CHECK(ts.b() == 5.0);
  CHECK(ts.sigma(2.0) == 3.0);
  CHECK(ts.rho(2.0) == 1.0);
  CHECK(ts.mu(2.0) == 1.0);
  // endpoint conventions
  CHECK(ts.sigma(5.0) == 5.0);
  CHECK(ts.mu(5.0) == 0.0);
  CHECK(ts.rho(0.0) == 0.0);
  CHECK(ts.kappa_size() == 5);
}

TEST_CASE("explicit non-uniform grid") {
  TimeScale ts = TimeScale::from_points({0.0, 0.5, 1.25, 3.0});
  CHECK(ts.size() == 4);
  CHECK(ts.mu(0.0) == 0.5);
  CHECK(ts.mu(0.5) == 0.75);
  CHECK(ts.mu(1.25) == 1.75);
  CHECK(ts.sigma(0.5) == 1.25);
  CHECK(ts.rho(3.0) == 1.25);

  Jump j = jump(ts, 0.5);
  CHECK(j.sigma == 1.25);
  CHECK(j.rho == 0.0);
  CHECK(j.mu == 0.75);
}

TEST_CASE("qscale generator") {
  TimeScale ts = TimeScale::qscale(2.0, 1.0, 4);  // 1, 2, 4, 8
  CHECK(ts.size() == 4);
  CHECK(ts[0] == 1.0);
  CHECK(ts[3] == 8.0);
  CHECK(ts.mu(2.0) == 2.0);
  CHECK(ts.spec().kind == ScaleSpec::Kind::QScale);
}

TEST_CASE("union spec merges and deduplicates") {
  auto spec = ScaleSpec::scale_union({ScaleSpec::uniform(0.0, 2.0, 1.0),
                                      ScaleSpec::explicit_points({1.0, 2.5})});
  TimeScalePtr ts = build_time_scale(spec);
  CHECK(ts->points() == std::vector<double>{0.0, 1.0, 2.0, 2.5});
}

TEST_CASE("membership snaps within relative 1e-9") {
  TimeScale ts = TimeScale::from_points({0.0, 0.5, 1.25, 3.0});
  CHECK(ts.try_index(1.25 + 1e-13).has_value());
  CHECK(ts.index_of(1.25 + 1e-13) == 2);
  CHECK_FALSE(ts.try_index(1.3).has_value());
  CHECK_THROWS_AS(ts.index_of(1.3), Error);
  try {
    ts.index_of(1.3);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotAPoint);
  }
}

TEST_CASE("invalid point sets are rejected") {
  CHECK_THROWS_AS(TimeScale::from_points({}), Error);
  CHECK_THROWS_AS(TimeScale::from_points({0.0, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(TimeScale::from_points({0.0, 2.0, 1.0}), Error);
  try {
    TimeScale::from_points({0.0, 2.0, 1.0});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonMonotone);
  }
  CHECK_THROWS_AS(TimeScale::uniform(0.0, 1.0, -0.5), Error);
  CHECK_THROWS_AS(TimeScale::qscale(1.0, 1.0, 3), Error);
}

TEST_CASE("restrict_range keeps the selected window") {
  TimeScale ts = TimeScale::uniform(0.0, 5.0, 1.0);
  TimeScale sub = ts.restrict_range(1, 3);
  CHECK(sub.points() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(sub.mu(3.0) == 0.0);
}

TEST_CASE("grid functions align with their scale") {
  auto ts = share(TimeScale::uniform(0.0, 3.0, 1.0));
  GridFunction f = GridFunction::sample(ts, [](double t) { return t * t; });
  CHECK(f.size() == 4);
  CHECK(f.at_point(2.0) == 4.0);
  CHECK(f.max_abs() == 9.0);
  GridFunction c = GridFunction::constant(ts, -2.5);
  CHECK(c[3] == -2.5);
  CHECK(c.max_abs() == 2.5);
}

TEST_CASE("kernel tables hold the lower triangle") {
  auto ts = share(TimeScale::uniform(0.0, 3.0, 1.0));
  KernelTable kt(ts);
  CHECK(kt.all_zero());
  kt.set(2, 1, 4.0);
  CHECK(kt.at(2, 1) == 4.0);
  CHECK(kt.at(2, 2) == 0.0);
  CHECK(kt.max_abs() == 4.0);
  CHECK_FALSE(kt.all_zero());

  KernelTable built = KernelTable::from_fn(
      ts, [](std::size_t i, std::size_t j) { return static_cast<double>(i * 10 + j); });
  CHECK(built.at(3, 2) == 32.0);
}

TEST_CASE("describe names the generator") {
  CHECK(TimeScale::uniform(0.0, 2.0, 1.0).describe().find("uniform") != std::string::npos);
  CHECK(TimeScale::from_points({0.0, 1.0}).describe().find("explicit") != std::string::npos);
}
