#pragma once

#include "tsvolterra/expr.hpp"
#include "tsvolterra/second_kind.hpp"
#include "tsvolterra/time_scale.hpp"

namespace tsvolterra {

// Shift (delay) of a grid function: values.at(i, j) holds fhat(t_i, t_j) for
// i >= j, where fhat solves the shifting problem
//
//   fhat^{Delta_t}(t, sigma(s)) = -fhat^{Delta_s}(t, s),   fhat(t, a) = f(t),
//
// discretized exactly on the grid. On the integers this is f(t - s + a).
struct ShiftTable {
  KernelTable values;
  double max_stencil_residual = 0.0;  // worst defect of the defining equation
};

ShiftTable shift(const GridFunction& f);

// (f * g)(t) = integral over [a, t) of fhat(t, sigma(s)) g(s) Delta s. The
// mirrored form with ghat and f must give the same values; forms_gap records
// the worst absolute disagreement between the two.
struct ConvolutionResult {
  GridFunction values;  // fhat-leading form
  double forms_gap = 0.0;
};

ConvolutionResult convolution(const GridFunction& f, const GridFunction& g);

// Second-kind problem phi = lambda (k * phi) + f whose kernel is given as a
// one-variable function k(t). The equation kernel khat(t, sigma(s)) is
// materialized here through the shift table; the diagonal of the resulting
// kernel table is never sampled by the equation and is left at zero.
ProblemSpec convolution_problem(TimeScalePtr scale, double lambda, const expr::Expr& kernel_fn,
                                const expr::Expr& forcing, SolverOptions options = {});

}  // namespace tsvolterra
