#include "tsvolterra/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

#include "tsvolterra/calculus.hpp"
#include "tsvolterra/convolution.hpp"
#include "tsvolterra/dynamic_bridge.hpp"
#include "tsvolterra/errors.hpp"
#include "tsvolterra/first_kind.hpp"
#include "tsvolterra/numeric.hpp"
#include "tsvolterra/problem_file.hpp"
#include "tsvolterra/report_io.hpp"
#include "tsvolterra/second_kind.hpp"

namespace tsvolterra::selftest {
namespace {

std::mt19937_64 seeded(int item) { return std::mt19937_64(77000u + static_cast<unsigned>(item)); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

[[noreturn]] void fail_check(const std::string& msg) { throw std::runtime_error(msg); }

void require(bool ok, const std::string& msg) {
  if (!ok) fail_check(msg);
}

void require_close(double measured, double expected, double tol, const std::string& what) {
  if (!approx_equal(measured, expected, tol)) {
    fail_check(what + ": got " + fmt(measured) + ", expected " + fmt(expected) + " (tol " +
               fmt(tol) + ")");
  }
}

// Grid points with gaps drawn from [0.1, 0.85] or [1.2, 1.55]. The hole around
// mu = 1 keeps 1 + lambda*mu bounded away from zero for every lambda in
// {1, -1, 0.5, -0.5}, so all random instances stay regressive with margin.
TimeScalePtr random_scale(std::mt19937_64& rng, std::size_t min_pts, std::size_t max_pts) {
  std::uniform_int_distribution<std::size_t> count_d(min_pts, max_pts);
  std::uniform_real_distribution<double> start_d(-2.0, 2.0);
  std::uniform_real_distribution<double> gap_d(0.1, 1.2);
  std::size_t n = count_d(rng);
  std::vector<double> pts;
  pts.reserve(n);
  double t = start_d(rng);
  pts.push_back(t);
  for (std::size_t i = 1; i < n; ++i) {
    double g = gap_d(rng);
    if (g > 0.85) g += 0.35;
    t += g;
    pts.push_back(t);
  }
  return share(TimeScale::from_points(std::move(pts)));
}

KernelTable random_kernel(const TimeScalePtr& ts, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  KernelTable kt(ts);
  for (std::size_t i = 0; i < ts->size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) kt.set(i, j, v(rng));
  return kt;
}

GridFunction random_grid(const TimeScalePtr& ts, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  std::vector<double> vals(ts->size());
  for (double& x : vals) x = v(rng);
  return GridFunction(ts, std::move(vals));
}

double factorial(unsigned k) {
  double r = 1.0;
  for (unsigned i = 2; i <= k; ++i) r *= i;
  return r;
}

// ---- item 1: phi = integral(phi) + 1 on Z cap [0,10] has solution 2^t ----

std::string item_geometric() {
  auto ts = share(TimeScale::uniform(0.0, 10.0, 1.0));
  auto p = ProblemSpec::from_exprs(ts, 1.0, expr::parse("1"), expr::parse("1"));
  double worst = 0.0;
  for (Method m : {Method::Direct, Method::Neumann, Method::Picard, Method::Resolvent}) {
    SolveReport rep;
    switch (m) {
      case Method::Direct: rep = solve_direct(p); break;
      case Method::Neumann: rep = neumann_solve(p); break;
      case Method::Picard: rep = picard_solve(p); break;
      case Method::Resolvent: rep = solve_resolvent(p); break;
    }
    for (std::size_t i = 0; i < ts->size(); ++i) {
      double expected = std::ldexp(1.0, static_cast<int>(i));
      require_close(rep.phi()[i], expected, 1e-12,
                    std::string(method_name(m)) + " at t=" + fmt((*ts)[i]));
      worst = std::max(worst, approx_gap(rep.phi()[i], expected));
    }
    if (m == Method::Picard)
      require(rep.terms_or_iterations <= 11,
              "picard used " + std::to_string(rep.terms_or_iterations) + " iterations");
    if (m == Method::Neumann)
      require(rep.terms_or_iterations <= 11,
              "neumann used " + std::to_string(rep.terms_or_iterations) + " terms");
  }
  return "max relative gap " + fmt(worst);
}

// ---- item 2: rational kernel family, candidate 1/(t+1) passes verify ----

std::string item_rational() {
  struct Case {
    const char* kernel;
    const char* forcing;
  };
  // Family indexed by n = 1, 2, 3 with c = -1: the kernel is
  //   (t+1)^{n-1} * sum_{k=1..n} (sigma(s)+1)^{-k} (s+1)^{-(n-k)}
  // and on grids starting at 0 the forcing reduces to (t+1)^{n-1}. The sum of
  // reciprocals is exactly the expansion of the delta derivative of
  // -(s+1)^{-n}, so the integral telescopes and phi(t) = 1/(t+1) solves the
  // equation with lambda = -1 on every isolated scale.
  const Case cases[3] = {
      {"1/(sigma(s)+1)", "1"},
      {"(t+1)*(1/((sigma(s)+1)*(s+1))+1/((sigma(s)+1)^2))", "t+1"},
      {"(t+1)^2*(1/((sigma(s)+1)*(s+1)^2)+1/((sigma(s)+1)^2*(s+1))+1/((sigma(s)+1)^3))",
       "(t+1)^2"},
  };
  const TimeScalePtr grids[2] = {
      share(TimeScale::uniform(0.0, 5.0, 1.0)),
      share(TimeScale::from_points({0.0, 0.5, 1.25, 3.0})),
  };
  double worst = 0.0;
  for (const auto& ts : grids) {
    for (int n = 1; n <= 3; ++n) {
      LoadedProblem lp;
      lp.kind = LoadedProblem::Kind::Second;
      lp.scale = ts;
      lp.options.tolerance = 1e-12;
      lp.second = ProblemSpec::from_exprs(ts, -1.0, expr::parse(cases[n - 1].kernel),
                                          expr::parse(cases[n - 1].forcing), lp.options);
      std::string csv = "t,phi\n";
      for (std::size_t i = 0; i < ts->size(); ++i) {
        csv += format_double((*ts)[i]);
        csv += ',';
        csv += format_double(1.0 / ((*ts)[i] + 1.0));
        csv += '\n';
      }
      auto out = verify_candidate(lp, csv);
      require(out.ok, "candidate rejected for n=" + std::to_string(n) + " on " +
                          ts->describe() + " (residual " + fmt(out.max_residual) + ")");
      worst = std::max(worst, out.max_residual);
    }
  }
  return "max residual " + fmt(worst);
}

// ---- item 3: terminating monomial series equals the product exponential ----

std::string item_exp_series() {
  auto rng = seeded(3);
  const double lambdas[4] = {1.0, -1.0, 0.5, -0.5};
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    auto ts = random_scale(rng, 2, 12);
    std::size_t n = ts->size();
    for (std::size_t s_idx = 0; s_idx < n; ++s_idx) {
      auto cols = monomials_up_to(*ts, static_cast<unsigned>(n - 1 - s_idx), s_idx);
      for (double lambda : lambdas) {
        for (std::size_t t_idx = s_idx; t_idx < n; ++t_idx) {
          // The gap is measured against the magnitude of what is summed.
          // For lambda < 0 the alternating terms cancel, so a gap relative
          // to the (possibly tiny) value is not representable in doubles;
          // relative to the term scale the identity holds to full precision,
          // and for lambda > 0 the two normalisations coincide.
          double series = 0.0;
          double scale_sum = 0.0;
          double pw = 1.0;
          for (std::size_t k = 0; k <= t_idx - s_idx; ++k) {
            series += pw * cols[k][t_idx];
            scale_sum += std::fabs(pw * cols[k][t_idx]);
            pw *= lambda;
          }
          double product = exp_constant(*ts, lambda, (*ts)[t_idx], (*ts)[s_idx]);
          double gap = std::fabs(series - product) / scale_sum;  // h_0 term makes it >= 1
          if (!(gap <= 1e-12))
            fail_check("series vs product at lambda=" + fmt(lambda) + ": scaled gap " +
                       fmt(gap) + " (tol 1e-12)");
          worst = std::max(worst, gap);
        }
      }
    }
  }
  return "max scaled gap " + fmt(worst);
}

// ---- item 4: iterated-kernel recursions agree; growth bound holds ----

std::string item_iterated() {
  auto rng = seeded(4);
  double worst_gap = 0.0;
  double worst_margin = 0.0;  // most negative slack-adjusted margin seen
  for (int rep = 0; rep < 100; ++rep) {
    auto ts = random_scale(rng, 3, 10);
    auto kt = random_kernel(ts, rng);
    auto p = ProblemSpec::from_tables(ts, 1.0, kt, GridFunction::constant(ts, 0.0));
    std::size_t n_max = ts->size() - 2;
    auto iter = iterated_kernels(p, n_max);
    require(iter.max_recursion_gap <= 1e-12,
            "recursion gap " + fmt(iter.max_recursion_gap));
    worst_gap = std::max(worst_gap, iter.max_recursion_gap);
    double big_m = kt.max_abs();
    for (std::size_t j = 0; j < ts->size(); ++j) {
      auto cols = monomials_up_to(*ts, static_cast<unsigned>(n_max), j);
      for (std::size_t level = 0; level <= n_max; ++level) {
        double mpow = std::pow(big_m, static_cast<double>(level + 1));
        for (std::size_t i = j; i < ts->size(); ++i) {
          double bound = mpow * cols[level][i];
          double margin = bound - std::abs(iter.tables[level].at(i, j));
          double slack = 1e-12 * (1.0 + std::abs(bound));
          require(margin >= -slack, "kernel growth bound violated by " + fmt(-margin));
          worst_margin = std::min(worst_margin, margin);
        }
      }
    }
  }
  return "recursion gap " + fmt(worst_gap) + ", bound margin >= " + fmt(worst_margin);
}

// ---- items 5 and 6 run on the same 50 random instances ----

struct Instance {
  ProblemSpec p;
};

std::vector<Instance> shared_instances() {
  auto rng = seeded(5);
  const double lambdas[4] = {1.0, -1.0, 0.5, -0.5};
  std::vector<Instance> out;
  out.reserve(50);
  for (int k = 0; k < 50; ++k) {
    auto ts = random_scale(rng, 3, 10);
    auto kt = random_kernel(ts, rng);
    auto f = random_grid(ts, rng);
    out.push_back({ProblemSpec::from_tables(ts, lambdas[k % 4], std::move(kt), std::move(f))});
  }
  return out;
}

std::string item_reciprocity() {
  double worst = 0.0;
  for (const auto& inst : shared_instances()) {
    auto r = resolvent(inst.p);
    auto gaps = reciprocity_check(inst.p, r);
    require(gaps.kernel_to_resolvent <= 1e-10,
            "kernel-to-resolvent gap " + fmt(gaps.kernel_to_resolvent));
    require(gaps.resolvent_to_kernel <= 1e-10,
            "resolvent-to-kernel gap " + fmt(gaps.resolvent_to_kernel));
    worst = std::max({worst, gaps.kernel_to_resolvent, gaps.resolvent_to_kernel});
  }
  return "max identity gap " + fmt(worst);
}

std::string item_resolvent_formula() {
  double worst = 0.0;
  for (const auto& inst : shared_instances()) {
    auto direct = solve_direct(inst.p);
    auto via = solve_resolvent(inst.p);
    for (std::size_t i = 0; i < inst.p.scale->size(); ++i) {
      require_close(via.phi()[i], direct.phi()[i], 1e-10, "resolvent route vs direct");
      worst = std::max(worst, approx_gap(via.phi()[i], direct.phi()[i]));
    }
  }
  return "max relative gap " + fmt(worst);
}

// ---- item 7: iterate-difference bound certified at every Picard step ----

std::string item_picard() {
  auto rng = seeded(7);
  const double lambdas[4] = {1.0, -1.0, 0.5, -0.5};
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    auto ts = random_scale(rng, 3, 10);
    auto kt = random_kernel(ts, rng);
    auto f = random_grid(ts, rng);
    SolverOptions opts;
    opts.method = Method::Picard;
    opts.tolerance = 1e-12;
    auto p = ProblemSpec::from_tables(ts, lambdas[k % 4], std::move(kt), std::move(f), opts);
    auto rep = picard_solve(p);
    for (const auto& chk : rep.checks)
      require(chk.ok, chk.name + " violated: " + fmt(chk.value) + " > " + fmt(chk.limit));
    auto direct = solve_direct(p);
    for (std::size_t i = 0; i < ts->size(); ++i) {
      require_close(rep.phi()[i], direct.phi()[i], 1e-9, "picard vs direct");
      worst = std::max(worst, approx_gap(rep.phi()[i], direct.phi()[i]));
    }
  }
  return "max relative gap " + fmt(worst);
}

// ---- item 8: IVP equals its integral-equation form on random problems ----

std::string item_ivp_bridge() {
  auto rng = seeded(8);
  std::uniform_int_distribution<std::size_t> order_d(1, 3);
  std::uniform_real_distribution<double> small(-0.5, 0.5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  auto linear_expr = [&](double c0, double c1) {
    using namespace expr;
    return binary(BinOp::Add, number(c0), binary(BinOp::Mul, number(c1), variable(Var::T)));
  };
  for (int k = 0; k < 50; ++k) {
    std::size_t n = order_d(rng);
    auto ts = random_scale(rng, n + 2, 10);
    std::vector<expr::Expr> coeffs;
    for (std::size_t i = 0; i < n; ++i) coeffs.push_back(linear_expr(small(rng), small(rng)));
    auto rhs = linear_expr(unit(rng), small(rng));
    std::vector<double> y0(n);
    for (double& v : y0) v = unit(rng);
    auto ivp = LinearIVP::create(ts, n, coeffs, rhs, (*ts)[0], y0);
    auto march = solve_ivp(ivp);

    auto prob = ivp_to_volterra(ivp);
    auto rep = solve_direct(prob);
    const GridFunction& phi = rep.phi();

    // top level from the equation vs the integral-equation solution
    const DerivativeGrid& top = march[n];
    require(phi.size() == top.values.size(), "window size mismatch");
    for (std::size_t idx = top.lo; idx <= top.hi; ++idx) {
      require_close(phi[idx - top.lo], top.at_index(idx), 1e-9, "phi vs marched top level");
      worst = std::max(worst, approx_gap(phi[idx - top.lo], top.at_index(idx)));
    }

    // n-fold forward difference of the marched y recovers phi as well
    std::vector<double> diff = march[0].values;
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<double> next(diff.size() - 1);
      for (std::size_t i = 0; i + 1 < diff.size(); ++i)
        next[i] = (diff[i + 1] - diff[i]) / ts->mu_at(march[0].lo + i);
      diff = std::move(next);
    }
    for (std::size_t i = 0; i < diff.size(); ++i) {
      require_close(diff[i], phi[i], 1e-9, "grid-differenced y vs phi");
      worst = std::max(worst, approx_gap(diff[i], phi[i]));
    }

    // reconstruction of the lower levels from phi matches the marched values
    auto taylor = taylor_reconstruct(ivp, phi);
    for (std::size_t lvl = 0; lvl < n; ++lvl) {
      const DerivativeGrid& want = march[lvl];
      const DerivativeGrid& got = taylor[lvl];
      require(got.lo == want.lo && got.hi <= want.hi, "reconstruction window mismatch");
      for (std::size_t idx = got.lo; idx <= got.hi; ++idx) {
        require_close(got.at_index(idx), want.at_index(idx), 1e-9, "reconstructed level");
        worst = std::max(worst, approx_gap(got.at_index(idx), want.at_index(idx)));
      }
    }
  }
  return "max relative gap " + fmt(worst);
}

// ---- item 9: polynomial kernel resolvent via the homogeneous problem ----

std::string item_poly_resolvent() {
  auto ts = share(TimeScale::uniform(0.0, 4.0, 0.5));
  PolyKernel k;
  k.order = 2;
  k.coeffs = {expr::number(0.0), expr::number(1.0)};
  auto ir = resolvent_via_ivp(k, 1.0, ts);

  std::size_t i10 = ts->index_of(1.0);
  std::size_t i00 = ts->index_of(0.0);
  require_close(ir.gamma.at(i10, i00), 0.5, 1e-9, "resolvent at (1, 0)");

  auto kt = k.materialize(ts);
  auto p = ProblemSpec::from_tables(ts, 1.0, kt, GridFunction::constant(ts, 0.0));
  auto series = resolvent(p);
  double worst = 0.0;
  for (std::size_t j = 0; j <= ir.max_index; ++j) {
    for (std::size_t i = j; i <= ir.max_index; ++i) {
      require_close(ir.gamma.at(i, j), series.gamma.at(i, j), 1e-9, "table vs series");
      worst = std::max(worst, approx_gap(ir.gamma.at(i, j), series.gamma.at(i, j)));
    }
  }

  // closed form for this kernel at lambda = 1, valid for t >= sigma(s)
  for (std::size_t j = 0; j + 1 <= ir.max_index; ++j) {
    double mu_s = ts->mu_at(j);
    for (std::size_t i = j + 1; i <= ir.max_index; ++i) {
      double t = (*ts)[i];
      double s = (*ts)[j];
      double closed = exp_constant(*ts, 1.0, t, s) / (2.0 * (1.0 + mu_s)) -
                      exp_constant(*ts, -1.0, t, s) / (2.0 * (1.0 - mu_s));
      require_close(ir.gamma.at(i, j), closed, 1e-9, "closed form");
      worst = std::max(worst, approx_gap(ir.gamma.at(i, j), closed));
    }
  }
  return "max relative gap " + fmt(worst);
}

// ---- item 10: first-kind reduction and round-trip recovery ----

std::string item_first_kind() {
  auto ts = share(TimeScale::uniform(0.0, 6.0, 1.0));
  auto p = FirstKindProblem::from_exprs(ts, expr::parse("cos1(t,sigma(s))"),
                                        expr::parse("hk(1,t,0)"));
  auto rep = solve_first_kind(p);
  const double expected[6] = {1.0, 1.0, 2.0, 4.0, 7.0, 11.0};
  require(rep.phi().size() == 6, "solution size");
  for (std::size_t i = 0; i < 6; ++i)
    require_close(rep.phi()[i], expected[i], 1e-10, "phi at t=" + fmt((*ts)[i]));
  require(rep.max_residual <= 1e-10, "residual " + fmt(rep.max_residual));

  auto rng = seeded(10);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto ts2 = random_scale(rng, 3, 10);
    std::size_t n = ts2->size();
    auto kt = random_kernel(ts2, rng);
    // the reduction divides by the sub-diagonal, so keep it away from zero
    for (std::size_t j = 0; j + 1 < n; ++j)
      kt.set(j + 1, j, (unit(rng) < 0.0 ? -1.0 : 1.0) * mag(rng));
    std::vector<double> truth(n - 1);
    for (double& v : truth) v = unit(rng);
    std::vector<double> f(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) acc += kt.at(i, j) * truth[j] * ts2->mu_at(j);
      f[i] = acc;
    }
    auto fp = FirstKindProblem::from_tables(ts2, std::move(kt), GridFunction(ts2, std::move(f)));
    auto r2 = solve_first_kind(fp);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      require_close(r2.phi()[j], truth[j], 1e-9, "round-trip recovery");
      worst = std::max(worst, approx_gap(r2.phi()[j], truth[j]));
    }
  }
  return "max relative gap " + fmt(worst);
}

// ---- item 11: convolution-kernel equation and the two integral forms ----

std::string item_convolution() {
  auto ts = share(TimeScale::uniform(0.0, 8.0, 1.0));
  auto conv = convolution_problem(ts, 2.0, expr::parse("cos1(t,0)"), expr::parse("sin1(t,0)"));
  auto rep = solve_direct(conv);
  // direct route through the explicitly shifted kernel
  auto p2 = ProblemSpec::from_exprs(ts, 2.0, expr::parse("cos1(t,sigma(s))"),
                                    expr::parse("sin1(t,0)"));
  auto rep2 = solve_direct(p2);
  double worst = 0.0;
  for (std::size_t i = 0; i < ts->size(); ++i) {
    double expected = i == 0 ? 0.0 : static_cast<double>(i) * std::ldexp(1.0, static_cast<int>(i) - 1);
    require_close(rep.phi()[i], expected, 1e-10, "convolution route at t=" + fmt((*ts)[i]));
    require_close(rep2.phi()[i], expected, 1e-10, "shifted-kernel route at t=" + fmt((*ts)[i]));
    worst = std::max({worst, approx_gap(rep.phi()[i], expected),
                      approx_gap(rep2.phi()[i], expected)});
  }

  auto rng = seeded(11);
  for (int k = 0; k < 100; ++k) {
    auto ts3 = random_scale(rng, 2, 10);
    auto f = random_grid(ts3, rng);
    auto g = random_grid(ts3, rng);
    auto r = convolution(f, g);
    double limit = 1e-10 * (1.0 + r.values.max_abs());
    require(r.forms_gap <= limit, "convolution forms gap " + fmt(r.forms_gap));
    worst = std::max(worst, r.forms_gap);
  }
  return "max gap " + fmt(worst);
}

// ---- item 12: nonlinear marching, iterate bound, monomial growth bound ----

std::string item_nonlinear() {
  auto ts = share(TimeScale::uniform(0.0, 3.0, 1.0));
  // F(x) = x^2 with |phi| <= 42 on the grid; alpha = 50 certifies the domain,
  // L = 2*alpha and M = alpha^2 certify the Lipschitz and magnitude bounds
  auto np = NonlinearProblem::create(ts, 1.0, expr::parse("x^2"), expr::parse("1"), 100.0,
                                     2500.0, 50.0);
  auto rep = solve_nonlinear(np, NonlinearMethod::Direct);
  const double expected[4] = {1.0, 2.0, 6.0, 42.0};
  for (std::size_t i = 0; i < 4; ++i)
    require(rep.phi()[i] == expected[i],
            "marching value at t=" + fmt((*ts)[i]) + ": " + fmt(rep.phi()[i]));
  require(!rep.left_domain, "marching left the certified domain");

  auto rng = seeded(12);
  std::uniform_real_distribution<double> small(-0.5, 0.5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto quadratic = [&](double c0, double c1, double c2) {
    using namespace expr;
    return binary(BinOp::Add,
                  binary(BinOp::Add, number(c0), binary(BinOp::Mul, number(c1), variable(Var::X))),
                  binary(BinOp::Mul, number(c2), power(variable(Var::X), 2)));
  };
  int successes = 0;
  int attempts = 0;
  while (successes < 20) {
    require(++attempts <= 400, "could not build 20 certified instances");
    auto ts2 = random_scale(rng, 3, 8);
    double c0 = small(rng), c1 = small(rng), c2 = small(rng);
    double lambda = unit(rng);
    double f0 = unit(rng);
    auto fexpr = expr::number(f0);
    auto certify = [&](double alpha) {
      double lip = std::abs(c1) + 2.0 * std::abs(c2) * alpha;
      double bnd = std::abs(c0) + std::abs(c1) * alpha + std::abs(c2) * alpha * alpha;
      return NonlinearProblem::create(ts2, lambda, quadratic(c0, c1, c2), fexpr, lip, bnd, alpha);
    };
    auto probe = certify(10.0);
    auto direct = solve_nonlinear(probe, NonlinearMethod::Direct);
    if (direct.left_domain) continue;
    auto np2 = certify(4.0 * (1.0 + direct.phi().max_abs()));
    np2.tolerance = 1e-12;
    SolveReport picard;
    try {
      picard = solve_nonlinear(np2, NonlinearMethod::Picard);
    } catch (const Error& e) {
      if (e.code() == Errc::DomainExit) continue;
      throw;
    }
    for (const auto& chk : picard.checks)
      require(chk.ok, chk.name + " violated: " + fmt(chk.value) + " > " + fmt(chk.limit));
    ++successes;
  }

  double worst_margin = 0.0;
  for (int g = 0; g < 100; ++g) {
    auto ts3 = random_scale(rng, 2, 12);
    for (std::size_t j = 0; j < ts3->size(); ++j) {
      auto cols = monomials_up_to(*ts3, 8, j);
      for (unsigned k = 0; k <= 8; ++k) {
        double fact = factorial(k);
        for (std::size_t i = j; i < ts3->size(); ++i) {
          double span = (*ts3)[i] - (*ts3)[j];
          double bound = std::pow(span, static_cast<double>(k)) / fact;
          double margin = bound - cols[k][i];
          require(margin >= -1e-12 * (1.0 + bound),
                  "monomial growth bound violated by " + fmt(-margin));
          worst_margin = std::min(worst_margin, margin);
        }
      }
    }
  }
  return "20 certified instances, monomial margin >= " + fmt(worst_margin);
}

// ---- item 13: change of integration order ----

std::string item_change_of_order() {
  auto rng = seeded(13);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto ts = random_scale(rng, 2, 12);
    double c0 = unit(rng), c1 = unit(rng), c2 = unit(rng), c3 = unit(rng);
    auto f = [&](double eta, double xi) { return c0 + c1 * eta + c2 * xi + c3 * eta * xi; };
    auto oc = change_of_order_check(*ts, f, ts->a(), ts->b());
    double gap = std::abs(oc.lhs - oc.rhs);
    require(gap <= 1e-12 * (1.0 + std::abs(oc.lhs)),
            "order swap gap " + fmt(gap) + " at lhs " + fmt(oc.lhs));
    worst = std::max(worst, gap / (1.0 + std::abs(oc.lhs)));
  }
  return "max normalised gap " + fmt(worst);
}

}  // namespace

const char* item_title(int number) {
  switch (number) {
    case 1: return "geometric solution by all methods";
    case 2: return "rational kernel verification";
    case 3: return "exponential-monomial series";
    case 4: return "iterated kernel identities";
    case 5: return "reciprocity of kernels";
    case 6: return "resolvent solution formula";
    case 7: return "picard iterate bound";
    case 8: return "ivp-volterra bridge";
    case 9: return "polynomial kernel resolvent";
    case 10: return "first-kind reduction";
    case 11: return "convolution kernel equation";
    case 12: return "nonlinear successive approximation";
    case 13: return "change of integration order";
    default: return "unknown item";
  }
}

ItemResult run_item(int number) {
  ItemResult r;
  r.number = number;
  r.name = item_title(number);
  try {
    switch (number) {
      case 1: r.detail = item_geometric(); break;
      case 2: r.detail = item_rational(); break;
      case 3: r.detail = item_exp_series(); break;
      case 4: r.detail = item_iterated(); break;
      case 5: r.detail = item_reciprocity(); break;
      case 6: r.detail = item_resolvent_formula(); break;
      case 7: r.detail = item_picard(); break;
      case 8: r.detail = item_ivp_bridge(); break;
      case 9: r.detail = item_poly_resolvent(); break;
      case 10: r.detail = item_first_kind(); break;
      case 11: r.detail = item_convolution(); break;
      case 12: r.detail = item_nonlinear(); break;
      case 13: r.detail = item_change_of_order(); break;
      default: r.detail = "no such item"; return r;
    }
    r.pass = true;
  } catch (const std::exception& ex) {
    r.pass = false;
    r.detail = ex.what();
  }
  return r;
}

std::vector<ItemResult> run_all() {
  std::vector<ItemResult> out;
  out.reserve(kItemCount);
  for (int i = 1; i <= kItemCount; ++i) out.push_back(run_item(i));
  return out;
}

}  // namespace tsvolterra::selftest
