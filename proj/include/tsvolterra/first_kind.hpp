#pragma once

#include <optional>

#include "tsvolterra/second_kind.hpp"

namespace tsvolterra {

// integral over [a, t) of K(t, eta) phi(eta) = f(t); no lambda, no phi outside
// the integral. Solvable here only when the sub-diagonal K(sigma(t), t) never
// vanishes, in which case delta-differentiating turns it into a second-kind
// equation on T^kappa.
struct FirstKindProblem {
  TimeScalePtr scale;
  KernelTable kernel;    // K(t_i, t_j) on the full grid
  GridFunction forcing;  // f on the full grid, f(a) must vanish
  std::optional<expr::Expr> kernel_expr;
  std::optional<expr::Expr> forcing_expr;
  double tolerance = 1e-10;

  // both factories run the load-time checks: |f(a)| <= 1e-12 (NonzeroAtA) and
  // |K(sigma(t), t)| > 1e-14 on T^kappa (ZeroDiagonal, listing offenders)
  static FirstKindProblem from_exprs(TimeScalePtr scale, const expr::Expr& kernel,
                                     const expr::Expr& forcing, double tolerance = 1e-10);
  static FirstKindProblem from_tables(TimeScalePtr scale, KernelTable kernel,
                                      GridFunction forcing, double tolerance = 1e-10);
};

// partial delta derivative in the first slot, (K(sigma(t), s) - K(t, s)) / mu(t);
// defined for t in T^kappa
double kernel_partial_delta1(const FirstKindProblem& p, double t, double s);

// Second-kind problem on the restricted scale (all points but the last):
//   phi(t) = -integral of [K^d1(t, eta) / K(sigma(t), t)] phi(eta) + f^d(t) / K(sigma(t), t)
// The minus sign is folded into lambda = -1; kernel and forcing are tables.
ProblemSpec first_to_second(const FirstKindProblem& p);

// Solves the transformed equation directly and reports phi on T^kappa. The
// residual is recomputed against the ORIGINAL first-kind equation at every
// point of the full grid (the value at b follows from constancy of the
// delta-differentiated residual, and is checked too).
SolveReport solve_first_kind(const FirstKindProblem& p);

std::vector<double> first_kind_residuals(const FirstKindProblem& p,
                                         const std::vector<double>& phi_on_kappa);

}  // namespace tsvolterra
