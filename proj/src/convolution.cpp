#include "tsvolterra/convolution.hpp"

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "tsvolterra/errors.hpp"

namespace tsvolterra {

ShiftTable shift(const GridFunction& f) {
  TimeScalePtr sp = f.scale_ptr();
  const TimeScale& ts = *sp;
  std::size_t n = ts.size();
  KernelTable tab(sp);

  // first column carries the initial condition, the diagonal pins fhat(s, s)
  // to f(a); each later column follows from the one before it through the
  // shifting equation written as a two-point stencil
  for (std::size_t i = 0; i < n; ++i) tab.set(i, 0, f[i]);
  for (std::size_t j = 1; j < n; ++j) {
    tab.set(j, j, f[0]);
    for (std::size_t i = j; i + 1 < n; ++i) {
      double ratio = ts.mu_at(i) / ts.mu_at(j - 1);
      tab.set(i + 1, j, tab.at(i, j) - ratio * (tab.at(i, j) - tab.at(i, j - 1)));
    }
  }

  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = j + 1; i + 1 < n; ++i) {
      double dt = (tab.at(i + 1, j + 1) - tab.at(i, j + 1)) / ts.mu_at(i);
      double ds = (tab.at(i, j + 1) - tab.at(i, j)) / ts.mu_at(j);
      worst = std::max(worst, std::abs(dt + ds));
    }
  }
  tab.check_finite();
  return ShiftTable{std::move(tab), worst};
}

ConvolutionResult convolution(const GridFunction& f, const GridFunction& g) {
  if (f.scale_ptr() != g.scale_ptr() && f.scale().points() != g.scale().points())
    throw Error(Errc::GridMismatch, "convolution operands live on different scales");

  const TimeScale& ts = f.scale();
  std::size_t n = ts.size();
  ShiftTable fs = shift(f);
  ShiftTable gs = shift(g);

  std::vector<double> form1(n, 0.0);
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      double mu = ts.mu_at(j);
      s1 += fs.values.at(i, j + 1) * g[j] * mu;
      s2 += gs.values.at(i, j + 1) * f[j] * mu;
    }
    form1[i] = s1;
    gap = std::max(gap, std::abs(s1 - s2));
  }
  return ConvolutionResult{GridFunction(f.scale_ptr(), std::move(form1)), gap};
}

ProblemSpec convolution_problem(TimeScalePtr scale, double lambda, const expr::Expr& kernel_fn,
                                const expr::Expr& forcing, SolverOptions options) {
  if (!scale) throw Error(Errc::BadArgument, "convolution_problem needs a scale");
  const TimeScale& ts = *scale;
  std::size_t n = ts.size();

  expr::EvalEnv env;
  env.scale = scale;
  std::vector<double> kv(n, 0.0);
  std::vector<double> fv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    env.t = ts[i];
    kv[i] = expr::evaluate(kernel_fn, env);
    fv[i] = expr::evaluate(forcing, env);
  }

  ShiftTable sh = shift(GridFunction(scale, std::move(kv)));
  KernelTable kt(scale);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) kt.set(i, j, sh.values.at(i, j + 1));

  ProblemSpec p = ProblemSpec::from_tables(scale, lambda, std::move(kt),
                                           GridFunction(scale, std::move(fv)), options);
  p.kernel_expr = kernel_fn;
  p.forcing_expr = forcing;
  return p;
}

}  // namespace tsvolterra
