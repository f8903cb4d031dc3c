#include "tsvolterra/first_kind.hpp"

#include <cmath>
#include <sstream>

namespace tsvolterra {

namespace {

void check_invariants(const FirstKindProblem& p) {
  const TimeScale& ts = *p.scale;
  if (std::fabs(p.forcing[0]) > 1e-12)
    throw Error(Errc::NonzeroAtA, "a first-kind equation forces f(a) = 0, got " +
                                      std::to_string(p.forcing[0]));
  std::ostringstream offenders;
  bool bad = false;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (std::fabs(p.kernel.at(i + 1, i)) <= 1e-14) {
      if (bad) offenders << ", ";
      offenders << ts[i];
      bad = true;
    }
  }
  if (bad)
    throw Error(Errc::ZeroDiagonal,
                "K(sigma(t), t) vanishes at t = " + offenders.str() +
                    "; the reduction to a second-kind equation needs it nonzero");
}

}  // namespace

FirstKindProblem FirstKindProblem::from_exprs(TimeScalePtr scale, const expr::Expr& kernel,
                                              const expr::Expr& forcing, double tolerance) {
  if (!scale) throw Error(Errc::BadArgument, "problem needs a scale");
  expr::EvalEnv env;
  env.scale = scale;
  KernelTable table = KernelTable::from_fn(scale, [&](std::size_t i, std::size_t j) {
    if (j == i) return 0.0;  // the reduction only reads K at (t, s) with s < t
    env.t = (*scale)[i];
    env.s = (*scale)[j];
    return expr::evaluate(kernel, env);
  });
  env.s.reset();
  std::vector<double> fv;
  fv.reserve(scale->size());
  for (double pnt : scale->points()) {
    env.t = pnt;
    fv.push_back(expr::evaluate(forcing, env));
  }
  FirstKindProblem p;
  p.scale = scale;
  p.kernel = std::move(table);
  p.forcing = GridFunction(scale, std::move(fv));
  p.kernel_expr = kernel;
  p.forcing_expr = forcing;
  p.tolerance = tolerance;
  check_invariants(p);
  return p;
}

FirstKindProblem FirstKindProblem::from_tables(TimeScalePtr scale, KernelTable kernel,
                                               GridFunction forcing, double tolerance) {
  if (!scale) throw Error(Errc::BadArgument, "problem needs a scale");
  if (kernel.points() != scale->size() || forcing.size() != scale->size())
    throw Error(Errc::BadArgument, "kernel/forcing tables must match the scale");
  kernel.check_finite();
  FirstKindProblem p;
  p.scale = std::move(scale);
  p.kernel = std::move(kernel);
  p.forcing = std::move(forcing);
  p.tolerance = tolerance;
  check_invariants(p);
  return p;
}

double kernel_partial_delta1(const FirstKindProblem& p, double t, double s) {
  const TimeScale& ts = *p.scale;
  std::size_t i = ts.index_of(t);
  std::size_t j = ts.index_of(s);
  if (i + 1 >= ts.size())
    throw Error(Errc::KappaBoundary, "partial delta derivative undefined at the last point");
  return (p.kernel.at(i + 1, j) - p.kernel.at(i, j)) / ts.mu_at(i);
}

ProblemSpec first_to_second(const FirstKindProblem& p) {
  const TimeScale& ts = *p.scale;
  std::size_t n = ts.size();
  // the transformed equation lives on T^kappa; graininess of interior points
  // is unchanged by dropping the last one
  TimeScalePtr sub = share(ts.restrict_range(0, n - 2));

  KernelTable kt(sub);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double diag = p.kernel.at(i + 1, i);
    double mu = ts.mu_at(i);
    for (std::size_t j = 0; j <= i; ++j) {
      double d1 = (p.kernel.at(i + 1, j) - p.kernel.at(i, j)) / mu;
      kt.set(i, j, d1 / diag);
    }
  }
  std::vector<double> fv(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double fd = (p.forcing[i + 1] - p.forcing[i]) / ts.mu_at(i);
    fv[i] = fd / p.kernel.at(i + 1, i);
  }
  SolverOptions opts;
  opts.tolerance = p.tolerance;
  return ProblemSpec::from_tables(sub, -1.0, std::move(kt), GridFunction(sub, std::move(fv)),
                                  std::move(opts));
}

std::vector<double> first_kind_residuals(const FirstKindProblem& p,
                                         const std::vector<double>& phi_on_kappa) {
  const TimeScale& ts = *p.scale;
  if (phi_on_kappa.size() + 1 != ts.size())
    throw Error(Errc::GridMismatch, "first-kind candidate must cover T^kappa");
  std::vector<double> res(ts.size(), 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += p.kernel.at(i, j) * phi_on_kappa[j] * ts.mu_at(j);
    res[i] = std::fabs(acc - p.forcing[i]);
  }
  return res;
}

SolveReport solve_first_kind(const FirstKindProblem& p) {
  ProblemSpec second = first_to_second(p);
  SolveReport inner = solve_direct(second);

  SolveReport rep;
  rep.method = "first-kind";
  rep.solution = inner.solution;
  rep.terms_or_iterations = 0;
  std::vector<double> res = first_kind_residuals(p, inner.solution[0].values());
  double res_at_b = res.back();
  res.pop_back();
  rep.residuals.push_back(res);
  rep.max_residual = res_at_b;
  for (double r : rep.residuals[0]) rep.max_residual = std::max(rep.max_residual, r);
  rep.residual_limit = p.tolerance * (1.0 + p.forcing.max_abs());
  CheckRecord at_b{"first-kind residual at b", res_at_b, rep.residual_limit,
                   res_at_b <= rep.residual_limit};
  rep.checks.push_back(at_b);
  return rep;
}

}  // namespace tsvolterra
