#include "tsvolterra/second_kind.hpp"

#include <algorithm>
#include <cmath>

#include "tsvolterra/calculus.hpp"
#include "tsvolterra/numeric.hpp"

namespace tsvolterra {

const char* method_name(Method m) {
  switch (m) {
    case Method::Direct: return "direct";
    case Method::Neumann: return "neumann";
    case Method::Picard: return "picard";
    case Method::Resolvent: return "resolvent";
  }
  return "?";
}

std::optional<Method> method_by_name(const std::string& name) {
  if (name == "direct") return Method::Direct;
  if (name == "neumann") return Method::Neumann;
  if (name == "picard") return Method::Picard;
  if (name == "resolvent") return Method::Resolvent;
  return std::nullopt;
}

namespace {

double pow_k(double base, std::size_t k) {
  double acc = 1.0;
  for (std::size_t i = 0; i < k; ++i) acc *= base;
  return acc;
}

// normalised violation of "measured <= allowed"; positive means broken
double violation(double measured, double allowed) {
  return (measured - allowed) / (1.0 + std::fabs(allowed));
}

constexpr double kCheckSlack = 1e-12;

}  // namespace

ProblemSpec ProblemSpec::from_exprs(TimeScalePtr scale, double lambda, const expr::Expr& kernel,
                                    const expr::Expr& forcing, SolverOptions options) {
  if (!scale) throw Error(Errc::BadArgument, "problem needs a scale");
  // full sweep at load: every pair the integrals can touch must evaluate.
  // Volterra integrals range over eta in [a, t), so only s < t is admissible;
  // the diagonal stays zero and is never read (kernels like cos1(t, sigma(s))
  // would step backwards there).
  expr::EvalEnv env;
  env.scale = scale;
  KernelTable table = KernelTable::from_fn(scale, [&](std::size_t i, std::size_t j) {
    if (j == i) return 0.0;
    env.t = (*scale)[i];
    env.s = (*scale)[j];
    return expr::evaluate(kernel, env);
  });
  env.s.reset();
  std::vector<double> fvals;
  fvals.reserve(scale->size());
  for (double p : scale->points()) {
    env.t = p;
    fvals.push_back(expr::evaluate(forcing, env));
  }
  ProblemSpec spec;
  spec.scale = scale;
  spec.lambda = lambda;
  spec.kernel = std::move(table);
  spec.forcing = GridFunction(scale, std::move(fvals));
  spec.kernel_expr = kernel;
  spec.forcing_expr = forcing;
  spec.options = std::move(options);
  return spec;
}

ProblemSpec ProblemSpec::from_tables(TimeScalePtr scale, double lambda, KernelTable kernel,
                                     GridFunction forcing, SolverOptions options) {
  if (!scale) throw Error(Errc::BadArgument, "problem needs a scale");
  if (kernel.points() != scale->size() || forcing.size() != scale->size())
    throw Error(Errc::BadArgument, "kernel/forcing tables must match the scale");
  kernel.check_finite();
  ProblemSpec spec;
  spec.scale = std::move(scale);
  spec.lambda = lambda;
  spec.kernel = std::move(kernel);
  spec.forcing = std::move(forcing);
  spec.options = std::move(options);
  return spec;
}

GridFunction ProblemSpec::picard_start() const {
  if (options.picard_initial) {
    expr::EvalEnv env;
    env.scale = scale;
    std::vector<double> vals;
    vals.reserve(scale->size());
    for (double p : scale->points()) {
      env.t = p;
      vals.push_back(expr::evaluate(*options.picard_initial, env));
    }
    return GridFunction(scale, std::move(vals));
  }
  return forcing;
}

std::vector<double> second_kind_residuals(const ProblemSpec& p, const std::vector<double>& phi) {
  const TimeScale& ts = *p.scale;
  if (phi.size() != ts.size())
    throw Error(Errc::GridMismatch, "candidate length does not match the grid");
  std::vector<double> res(ts.size(), 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += p.kernel.at(i, j) * phi[j] * ts.mu_at(j);
    res[i] = std::fabs(phi[i] - p.lambda * acc - p.forcing[i]);
  }
  return res;
}

namespace {

SolveReport make_scalar_report(const ProblemSpec& p, std::string method, std::vector<double> phi,
                               std::size_t terms) {
  SolveReport rep;
  rep.method = std::move(method);
  rep.residuals.push_back(second_kind_residuals(p, phi));
  rep.solution.emplace_back(p.scale, std::move(phi));
  rep.max_residual = 0.0;
  for (double r : rep.residuals[0]) rep.max_residual = std::max(rep.max_residual, r);
  rep.residual_limit = p.options.tolerance * (1.0 + rep.solution[0].max_abs());
  rep.terms_or_iterations = terms;
  return rep;
}

}  // namespace

SolveReport solve_direct(const ProblemSpec& p) {
  const TimeScale& ts = *p.scale;
  std::vector<double> phi(ts.size(), 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += p.kernel.at(i, j) * phi[j] * ts.mu_at(j);
    phi[i] = p.lambda * acc + p.forcing[i];
  }
  return make_scalar_report(p, "direct", std::move(phi), 0);
}

IteratedKernels iterated_kernels(const ProblemSpec& p, std::size_t n_max) {
  const TimeScale& ts = *p.scale;
  std::size_t n = ts.size();
  IteratedKernels out;
  out.tables.push_back(p.kernel);
  KernelTable alt = p.kernel;  // same recursion with the factors swapped
  for (std::size_t level = 1; level <= n_max; ++level) {
    const KernelTable& prev = out.tables.back();
    KernelTable next(p.scale);
    KernelTable next_alt(p.scale);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double acc = 0.0;
        double acc_alt = 0.0;
        for (std::size_t l = j + 1; l < i; ++l) {
          acc += p.kernel.at(i, l) * prev.at(l, j) * ts.mu_at(l);
          acc_alt += alt.at(i, l) * p.kernel.at(l, j) * ts.mu_at(l);
        }
        next.set(i, j, acc);
        next_alt.set(i, j, acc_alt);
        out.max_recursion_gap = std::max(out.max_recursion_gap, approx_gap(acc, acc_alt));
      }
    }
    out.tables.push_back(next);
    alt = next_alt;
  }
  return out;
}

ResolventTable resolvent(const ProblemSpec& p) {
  const TimeScale& ts = *p.scale;
  std::size_t n = ts.size();
  // K_l vanishes identically once l exceeds N-2, so the series is finite
  std::size_t depth_cap = n >= 2 ? n - 2 : 0;
  ResolventTable out;
  out.gamma = p.kernel;  // lambda^0 term
  KernelTable current = p.kernel;
  std::size_t level = 0;
  while (level < depth_cap && !current.all_zero()) {
    ++level;
    KernelTable next(p.scale);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double acc = 0.0;
        for (std::size_t l = j + 1; l < i; ++l)
          acc += p.kernel.at(i, l) * current.at(l, j) * ts.mu_at(l);
        next.set(i, j, acc);
      }
    }
    double scale_l = pow_k(p.lambda, level);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        out.gamma.set(i, j, out.gamma.at(i, j) + scale_l * next.at(i, j));
    current = std::move(next);
    if (current.all_zero()) break;
  }
  out.depth = level;
  return out;
}

SolveReport solve_resolvent(const ProblemSpec& p) {
  ResolventTable r = resolvent(p);
  const TimeScale& ts = *p.scale;
  std::vector<double> phi(ts.size(), 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += r.gamma.at(i, j) * p.forcing[j] * ts.mu_at(j);
    phi[i] = p.lambda * acc + p.forcing[i];
  }
  return make_scalar_report(p, "resolvent", std::move(phi), r.depth + 1);
}

SolveReport neumann_solve(const ProblemSpec& p, std::size_t max_terms) {
  const TimeScale& ts = *p.scale;
  std::size_t n = ts.size();
  if (max_terms == 0) max_terms = p.options.max_terms;
  // phi_l(t_i) = 0 once l > i, so the series terminates after N terms
  std::size_t natural = n;  // indices 0..n-1
  std::size_t cap = max_terms == 0 ? natural : std::min(max_terms, natural);

  std::vector<std::vector<double>> terms;
  terms.push_back(p.forcing.values());
  for (std::size_t level = 1; level < cap; ++level) {
    const auto& prev = terms.back();
    std::vector<double> next(n, 0.0);
    bool nonzero = false;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) acc += p.kernel.at(i, j) * prev[j] * ts.mu_at(j);
      next[i] = acc;
      if (acc != 0.0) nonzero = true;
    }
    terms.push_back(std::move(next));
    if (!nonzero) break;
  }

  std::vector<double> phi(n, 0.0);
  for (std::size_t level = 0; level < terms.size(); ++level) {
    double w = pow_k(p.lambda, level);
    for (std::size_t i = 0; i < n; ++i) phi[i] += w * terms[level][i];
  }

  double big_l = p.forcing.max_abs();
  double big_m = p.kernel.max_abs();
  auto h = monomials_up_to(ts, static_cast<unsigned>(n), 0);

  // term bound |phi_l(t)| <= L M^l h_l(t, a)
  CheckRecord bound_check{"neumann term bound", 0.0, kCheckSlack, true};
  double worst = -1.0;
  for (std::size_t level = 0; level < terms.size(); ++level) {
    double factor = big_l * pow_k(big_m, level);
    for (std::size_t i = 0; i < n; ++i) {
      double v = violation(std::fabs(terms[level][i]), factor * h[level][i]);
      worst = std::max(worst, v);
    }
  }
  bound_check.value = worst;
  bound_check.ok = worst <= bound_check.limit;

  // term identity phi_l(t) = integral of K_{l-1}(t, eta) f(eta)
  CheckRecord identity_check{"neumann term identity", 0.0, 1e-12, true};
  if (terms.size() > 1) {
    IteratedKernels iks = iterated_kernels(p, terms.size() - 2);
    for (std::size_t level = 1; level < terms.size(); ++level) {
      const KernelTable& kk = iks.tables[level - 1];
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) acc += kk.at(i, j) * p.forcing[j] * ts.mu_at(j);
        identity_check.value = std::max(identity_check.value, approx_gap(acc, terms[level][i]));
      }
    }
  }
  identity_check.ok = identity_check.value <= identity_check.limit;

  bool truncated = terms.size() == cap && cap < natural && !terms.back().empty() &&
                   std::any_of(terms.back().begin(), terms.back().end(),
                               [](double v) { return v != 0.0; });
  double tail = 0.0;
  if (truncated) {
    // remainder estimate L * sum over l > n of |lambda M|^l h_l(b, a)
    auto hh = monomials_up_to(ts, static_cast<unsigned>(n), 0);
    for (std::size_t level = terms.size(); level <= n; ++level)
      tail += big_l * pow_k(std::fabs(p.lambda) * big_m, level) * hh[level][n - 1];
  }

  SolveReport rep = make_scalar_report(p, "neumann", std::move(phi), terms.size());
  rep.checks.push_back(bound_check);
  rep.checks.push_back(identity_check);
  rep.truncated = truncated;
  rep.tail_bound = tail;
  if (truncated && tail > p.options.tolerance * (1.0 + rep.solution[0].max_abs()))
    throw Error(Errc::Truncated, "series cut at " + std::to_string(terms.size()) +
                                     " terms, remainder bound " + std::to_string(tail));
  return rep;
}

SolveReport picard_solve(const ProblemSpec& p) {
  const TimeScale& ts = *p.scale;
  std::size_t n = ts.size();
  GridFunction start = p.picard_start();

  double big_l = start.max_abs();
  double big_m = p.kernel.max_abs();
  double big_n = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    big_n = std::max(big_n, std::fabs(p.forcing[i] - start[i]));
  auto h = monomials_up_to(ts, static_cast<unsigned>(n + 1), 0);
  double la = std::fabs(p.lambda);

  auto diff_bound = [&](std::size_t iter, std::size_t i) {
    // |phi_n - phi_{n-1}| <= |lambda|^n L M^n h_n + |lambda|^{n-1} N M^{n-1} h_{n-1}
    double first = pow_k(la, iter) * big_l * pow_k(big_m, iter) * h[iter][i];
    double second =
        pow_k(la, iter - 1) * big_n * pow_k(big_m, iter - 1) * h[iter - 1][i];
    return first + second;
  };
  auto tail_after = [&](std::size_t iter) {
    double acc = 0.0;
    for (std::size_t m = iter + 1; m <= n; ++m) {
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, diff_bound(m, i));
      acc += worst;
    }
    return acc;
  };

  std::size_t cap = p.options.max_iterations == 0
                        ? n
                        : std::min<std::size_t>(p.options.max_iterations, n);

  CheckRecord bound_check{"picard difference bound", -1.0, kCheckSlack, true};
  std::vector<double> prev = start.values();
  std::vector<double> cur(n, 0.0);
  std::size_t iter = 0;
  bool converged = false;
  while (iter < cap) {
    ++iter;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) acc += p.kernel.at(i, j) * prev[j] * ts.mu_at(j);
      cur[i] = p.lambda * acc + p.forcing[i];
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff = std::max(diff, std::fabs(cur[i] - prev[i]));
      bound_check.value = std::max(
          bound_check.value, violation(std::fabs(cur[i] - prev[i]), diff_bound(iter, i)));
    }
    prev = cur;
    if (diff <= p.options.tolerance) {
      converged = true;
      break;
    }
    if (tail_after(iter) <= p.options.tolerance) {
      converged = true;
      break;
    }
    if (iter == n) {
      converged = true;  // structural exactness on an n-point grid
      break;
    }
  }
  if (!converged)
    throw Error(Errc::MaxIterations,
                "picard stopped after " + std::to_string(iter) + " iterations without meeting tolerance");
  bound_check.ok = bound_check.value <= bound_check.limit;

  SolveReport rep = make_scalar_report(p, "picard", std::move(cur), iter);
  rep.checks.push_back(bound_check);
  return rep;
}

ReciprocityGaps reciprocity_check(const ProblemSpec& p, const ResolventTable& r) {
  const TimeScale& ts = *p.scale;
  std::size_t n = ts.size();
  ReciprocityGaps gaps;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc1 = 0.0;  // integral of K(t, eta) Gamma(eta, s)
      double acc2 = 0.0;  // integral of Gamma(t, eta) K(eta, s)
      for (std::size_t l = j + 1; l < i; ++l) {
        acc1 += p.kernel.at(i, l) * r.gamma.at(l, j) * ts.mu_at(l);
        acc2 += r.gamma.at(i, l) * p.kernel.at(l, j) * ts.mu_at(l);
      }
      double lhs1 = r.gamma.at(i, j);
      double rhs1 = p.lambda * acc1 + p.kernel.at(i, j);
      gaps.kernel_to_resolvent = std::max(gaps.kernel_to_resolvent, approx_gap(lhs1, rhs1));
      double lhs2 = p.kernel.at(i, j);
      double rhs2 = -p.lambda * acc2 + r.gamma.at(i, j);
      gaps.resolvent_to_kernel = std::max(gaps.resolvent_to_kernel, approx_gap(lhs2, rhs2));
    }
  }
  return gaps;
}

SystemProblem SystemProblem::from_exprs(TimeScalePtr scale, double lambda,
                                        const std::vector<std::vector<expr::Expr>>& kernel,
                                        const std::vector<expr::Expr>& forcing) {
  if (!scale) throw Error(Errc::BadArgument, "problem needs a scale");
  std::size_t m = forcing.size();
  if (m == 0) throw Error(Errc::InvalidProblem, "system needs at least one component");
  if (kernel.size() != m)
    throw Error(Errc::InvalidProblem, "system kernel must be square and match the forcing");
  for (const auto& row : kernel)
    if (row.size() != m)
      throw Error(Errc::InvalidProblem, "system kernel must be square and match the forcing");

  SystemProblem sys;
  sys.scale = scale;
  sys.lambda = lambda;
  sys.kernel_exprs = kernel;
  sys.forcing_exprs = forcing;
  expr::EvalEnv env;
  env.scale = scale;
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<KernelTable> row;
    for (std::size_t c = 0; c < m; ++c) {
      row.push_back(KernelTable::from_fn(scale, [&](std::size_t i, std::size_t j) {
        if (j == i) return 0.0;  // integrals never reach s = t
        env.t = (*scale)[i];
        env.s = (*scale)[j];
        return expr::evaluate(kernel[r][c], env);
      }));
    }
    sys.kernel.push_back(std::move(row));
    env.s.reset();
    std::vector<double> fv;
    fv.reserve(scale->size());
    for (double pnt : scale->points()) {
      env.t = pnt;
      fv.push_back(expr::evaluate(forcing[r], env));
    }
    sys.forcing.emplace_back(scale, std::move(fv));
  }
  return sys;
}

SolveReport solve_system_direct(const SystemProblem& p) {
  const TimeScale& ts = *p.scale;
  std::size_t n = ts.size();
  std::size_t m = p.dimension();
  std::vector<std::vector<double>> phi(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < m; ++r) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < m; ++c) dot += p.kernel[r][c].at(i, j) * phi[c][j];
        acc += dot * ts.mu_at(j);
      }
      phi[r][i] = p.lambda * acc + p.forcing[r][i];
    }
  }

  SolveReport rep;
  rep.method = "direct";
  rep.max_residual = 0.0;
  double max_abs = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<double> res(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < m; ++c) dot += p.kernel[r][c].at(i, j) * phi[c][j];
        acc += dot * ts.mu_at(j);
      }
      res[i] = std::fabs(phi[r][i] - p.lambda * acc - p.forcing[r][i]);
      rep.max_residual = std::max(rep.max_residual, res[i]);
      max_abs = std::max(max_abs, std::fabs(phi[r][i]));
    }
    rep.residuals.push_back(std::move(res));
  }
  for (std::size_t r = 0; r < m; ++r) rep.solution.emplace_back(p.scale, std::move(phi[r]));
  rep.residual_limit = 1e-10 * (1.0 + max_abs);
  return rep;
}

namespace {

double eval_integrand(const NonlinearProblem& p, double t, double s, double x) {
  expr::EvalEnv env;
  env.scale = p.scale;
  env.t = t;
  env.s = s;
  env.x = x;
  return expr::evaluate(p.integrand, env);
}

}  // namespace

NonlinearProblem NonlinearProblem::create(TimeScalePtr scale, double lambda,
                                          const expr::Expr& integrand, const expr::Expr& forcing,
                                          double lipschitz, double bound, double alpha) {
  if (!scale) throw Error(Errc::BadArgument, "problem needs a scale");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(Errc::InvalidProblem, "domain half-width alpha must be positive");
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz))
    throw Error(Errc::InvalidProblem, "lipschitz constant must be nonnegative");
  if (!(bound >= 0.0) || !std::isfinite(bound))
    throw Error(Errc::InvalidProblem, "integrand bound must be nonnegative");

  NonlinearProblem p;
  p.scale = scale;
  p.lambda = lambda;
  p.integrand = integrand;
  p.forcing_expr = forcing;
  p.lipschitz = lipschitz;
  p.bound = bound;
  p.alpha = alpha;

  expr::EvalEnv env;
  env.scale = scale;
  std::vector<double> fv;
  fv.reserve(scale->size());
  for (double pnt : scale->points()) {
    env.t = pnt;
    fv.push_back(expr::evaluate(forcing, env));
  }
  p.forcing = GridFunction(scale, std::move(fv));

  // certificate spot-check on a coarse sample of the triangle and of [-alpha, alpha]
  std::size_t n = scale->size();
  std::size_t stride = std::max<std::size_t>(1, n / 10);
  std::vector<double> xs;
  for (int k = 0; k < 10; ++k) xs.push_back(-alpha + (2.0 * alpha) * (k / 9.0));
  for (std::size_t i = 0; i < n; i += stride) {
    for (std::size_t j = 0; j <= i; j += stride) {
      double t = (*scale)[i];
      double s = (*scale)[j];
      std::vector<double> vals;
      vals.reserve(xs.size());
      for (double x : xs) {
        double v = eval_integrand(p, t, s, x);
        if (std::fabs(v) > bound + 1e-9 * (1.0 + bound))
          throw Error(Errc::InvalidProblem, "integrand exceeds its stated bound at a sample point");
        vals.push_back(v);
      }
      for (std::size_t u = 0; u < xs.size(); ++u) {
        for (std::size_t w = u + 1; w < xs.size(); ++w) {
          double allowed = lipschitz * std::fabs(xs[u] - xs[w]);
          if (std::fabs(vals[u] - vals[w]) > allowed + 1e-9 * (1.0 + allowed))
            throw Error(Errc::InvalidProblem,
                        "integrand violates its stated Lipschitz constant at a sample pair");
        }
      }
    }
  }
  return p;
}

double NonlinearProblem::guaranteed_endpoint() const {
  const TimeScale& ts = *scale;
  double span = ts.b() - ts.a();
  double delta = bound > 0.0 ? std::min(span, alpha / bound) : span;
  double target = ts.a() + delta;
  double best = ts.a();
  for (double pnt : ts.points()) {
    if (pnt <= target + 1e-9 * std::max(1.0, std::fabs(target))) best = pnt;
  }
  return best;
}

std::vector<double> nonlinear_residuals(const NonlinearProblem& p,
                                        const std::vector<double>& phi) {
  const TimeScale& ts = *p.scale;
  if (phi.size() != ts.size())
    throw Error(Errc::GridMismatch, "candidate length does not match the grid");
  std::vector<double> res(ts.size(), 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j)
      acc += eval_integrand(p, ts[i], ts[j], phi[j]) * ts.mu_at(j);
    res[i] = std::fabs(phi[i] - p.lambda * acc - p.forcing[i]);
  }
  return res;
}

SolveReport solve_nonlinear(const NonlinearProblem& p, NonlinearMethod method) {
  const TimeScale& ts = *p.scale;
  std::size_t n = ts.size();

  auto finish = [&](std::vector<double> phi, std::size_t iters) {
    SolveReport rep;
    rep.method = method == NonlinearMethod::Direct ? "nonlinear-direct" : "nonlinear-picard";
    rep.residuals.push_back(nonlinear_residuals(p, phi));
    rep.solution.emplace_back(p.scale, std::move(phi));
    for (double r : rep.residuals[0]) rep.max_residual = std::max(rep.max_residual, r);
    rep.residual_limit = p.tolerance * (1.0 + rep.solution[0].max_abs());
    rep.terms_or_iterations = iters;
    rep.guaranteed_until = p.guaranteed_endpoint();
    return rep;
  };

  if (method == NonlinearMethod::Direct) {
    std::vector<double> phi(n, 0.0);
    bool exited = false;
    double exit_point = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j)
        acc += eval_integrand(p, ts[i], ts[j], phi[j]) * ts.mu_at(j);
      phi[i] = p.lambda * acc + p.forcing[i];
      if (!exited && std::fabs(phi[i]) > p.alpha) {
        exited = true;
        exit_point = ts[i];
      }
    }
    SolveReport rep = finish(std::move(phi), 0);
    rep.left_domain = exited;
    if (exited) rep.first_exit_point = exit_point;
    return rep;
  }

  // picard mode: stay inside the certified domain or fail
  std::vector<double> prev;
  if (p.picard_initial) {
    expr::EvalEnv env;
    env.scale = p.scale;
    for (double pnt : ts.points()) {
      env.t = pnt;
      prev.push_back(expr::evaluate(*p.picard_initial, env));
    }
  } else {
    prev = p.forcing.values();
  }

  // the error bound is asserted against the direct solution at every iterate
  SolveReport direct = solve_nonlinear(p, NonlinearMethod::Direct);
  const auto& exact = direct.solution[0];
  double big_n = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    big_n = std::max(big_n, std::fabs(p.forcing[i] - prev[i]));
  auto h = monomials_up_to(ts, static_cast<unsigned>(n + 1), 0);
  double la = std::fabs(p.lambda);

  CheckRecord bound_check{"nonlinear iterate bound", -1.0, kCheckSlack, true};
  std::size_t cap = p.max_iterations == 0 ? n : std::min<std::size_t>(p.max_iterations, n);
  std::vector<double> cur(n, 0.0);
  std::size_t iter = 0;
  bool converged = false;
  while (iter < cap) {
    ++iter;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j)
        acc += eval_integrand(p, ts[i], ts[j], prev[j]) * ts.mu_at(j);
      cur[i] = p.lambda * acc + p.forcing[i];
      if (std::fabs(cur[i]) > p.alpha)
        throw Error(Errc::DomainExit, "picard iterate left |x| <= alpha at t = " +
                                          std::to_string(ts[i]));
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff = std::max(diff, std::fabs(cur[i] - prev[i]));
      // |phi - phi_n| <= |la|^{n+1} M L^n h_{n+1} + |la|^{n-1} N L^n h_n
      double allowed = pow_k(la, iter + 1) * p.bound * pow_k(p.lipschitz, iter) * h[iter + 1][i] +
                       pow_k(la, iter - 1) * big_n * pow_k(p.lipschitz, iter) * h[iter][i];
      bound_check.value =
          std::max(bound_check.value, violation(std::fabs(exact[i] - cur[i]), allowed));
    }
    prev = cur;
    if (diff <= p.tolerance || iter == n) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw Error(Errc::MaxIterations, "nonlinear picard hit the iteration cap without converging");
  bound_check.ok = bound_check.value <= bound_check.limit;

  SolveReport rep = finish(std::move(cur), iter);
  rep.checks.push_back(bound_check);
  return rep;
}

}  // namespace tsvolterra
