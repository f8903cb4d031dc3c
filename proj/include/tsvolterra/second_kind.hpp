#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsvolterra/expr.hpp"
#include "tsvolterra/time_scale.hpp"

namespace tsvolterra {

enum class Method { Direct, Neumann, Picard, Resolvent };

const char* method_name(Method m);
std::optional<Method> method_by_name(const std::string& name);

struct SolverOptions {
  Method method = Method::Direct;
  double tolerance = 1e-10;
  std::size_t max_terms = 0;       // 0: run to structural termination
  std::size_t max_iterations = 0;  // 0: structural cap (grid size)
  std::optional<expr::Expr> picard_initial;  // defaults to the forcing
};

// phi(t) = lambda * integral over [a, t) of K(t, eta) phi(eta) + f(t).
// Kernel and forcing are materialized over the full grid at construction, so
// every solver works off exact tables; the source expressions (when the
// problem came from text) ride along for reporting.
struct ProblemSpec {
  TimeScalePtr scale;
  double lambda = 0.0;
  KernelTable kernel;
  GridFunction forcing;
  std::optional<expr::Expr> kernel_expr;
  std::optional<expr::Expr> forcing_expr;
  SolverOptions options;

  static ProblemSpec from_exprs(TimeScalePtr scale, double lambda, const expr::Expr& kernel,
                                const expr::Expr& forcing, SolverOptions options = {});
  static ProblemSpec from_tables(TimeScalePtr scale, double lambda, KernelTable kernel,
                                 GridFunction forcing, SolverOptions options = {});

  GridFunction picard_start() const;
};

// one recorded inequality / identity check; `value` is the measured quantity,
// `limit` what it had to stay within
struct CheckRecord {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool ok = true;
};

struct NamedGrid {
  std::string name;
  std::size_t first_index = 0;  // index into the ORIGINAL scale of values.front()
  GridFunction values;
};

struct SolveReport {
  std::string method;
  std::vector<GridFunction> solution;          // one entry unless the problem is a system
  std::vector<std::vector<double>> residuals;  // aligned with solution rows
  double max_residual = 0.0;
  double residual_limit = 0.0;
  std::size_t terms_or_iterations = 0;
  std::vector<CheckRecord> checks;
  bool truncated = false;
  double tail_bound = 0.0;
  std::optional<double> guaranteed_until;  // nonlinear: endpoint of the certified interval
  bool left_domain = false;
  std::optional<double> first_exit_point;
  std::vector<NamedGrid> auxiliary;  // e.g. reconstructed derivatives

  const GridFunction& phi() const { return solution.front(); }
};

// residuals of the second-kind equation for a candidate phi, one per point
std::vector<double> second_kind_residuals(const ProblemSpec& p, const std::vector<double>& phi);

// Forward substitution along the grid; exact on isolated scales and the
// oracle every other solver is compared against.
SolveReport solve_direct(const ProblemSpec& p);

struct IteratedKernels {
  std::vector<KernelTable> tables;  // K_0 .. K_n
  double max_recursion_gap = 0.0;   // disagreement between the two recursions
};

// K_0 = K, K_n(t,s) = integral over [sigma(s), t) of K(t,eta) K_{n-1}(eta,s).
// Also runs the companion recursion (K_{n-1} leading) and records the gap.
IteratedKernels iterated_kernels(const ProblemSpec& p, std::size_t n_max);

struct ResolventTable {
  KernelTable gamma;
  std::size_t depth = 0;  // largest series index with a structurally nonzero table
};

// Gamma(lambda; t, s) = sum of lambda^l K_l(t, s); finite on isolated scales.
ResolventTable resolvent(const ProblemSpec& p);

// phi(t) = lambda * integral of Gamma(lambda; t, eta) f(eta) + f(t)
SolveReport solve_resolvent(const ProblemSpec& p);

// Truncated Neumann sum phi = sum of lambda^l phi_l with phi_0 = f and
// phi_l = integral of K phi_{l-1}. Records the term bound and the iterated-
// kernel term identity as checks. max_terms = 0 runs to termination.
SolveReport neumann_solve(const ProblemSpec& p, std::size_t max_terms = 0);

// Picard iteration phi_n = lambda * integral of K phi_{n-1} + f. Stops when
// the sup difference drops under tolerance, when the iterate-difference bound
// certifies the tail, or structurally after N iterations (exactness).
SolveReport picard_solve(const ProblemSpec& p);

// reciprocity identities tying kernel and resolvent together; returns the
// worst normalised gap of each
struct ReciprocityGaps {
  double kernel_to_resolvent = 0.0;
  double resolvent_to_kernel = 0.0;
};
ReciprocityGaps reciprocity_check(const ProblemSpec& p, const ResolventTable& r);

struct SystemProblem {
  TimeScalePtr scale;
  double lambda = 0.0;
  std::vector<std::vector<KernelTable>> kernel;  // m x m
  std::vector<GridFunction> forcing;             // m
  std::vector<std::vector<expr::Expr>> kernel_exprs;
  std::vector<expr::Expr> forcing_exprs;

  static SystemProblem from_exprs(TimeScalePtr scale, double lambda,
                                  const std::vector<std::vector<expr::Expr>>& kernel,
                                  const std::vector<expr::Expr>& forcing);
  std::size_t dimension() const { return forcing.size(); }
};

SolveReport solve_system_direct(const SystemProblem& p);

struct NonlinearProblem {
  TimeScalePtr scale;
  double lambda = 0.0;
  expr::Expr integrand;  // F(t, s, x)
  GridFunction forcing;
  std::optional<expr::Expr> forcing_expr;
  double lipschitz = 0.0;     // L in |F(t,s,x) - F(t,s,y)| <= L |x - y|
  double bound = 0.0;         // M with |F| <= M for |x| <= alpha
  double alpha = 0.0;         // certified x-domain half-width
  std::optional<expr::Expr> picard_initial;
  double tolerance = 1e-10;
  std::size_t max_iterations = 0;

  // spot-checks the certificate on a sample and computes nothing else
  static NonlinearProblem create(TimeScalePtr scale, double lambda, const expr::Expr& integrand,
                                 const expr::Expr& forcing, double lipschitz, double bound,
                                 double alpha);

  // largest grid point <= a + min(b - a, alpha / M)
  double guaranteed_endpoint() const;
};

enum class NonlinearMethod { Direct, Picard };

// Direct mode marches forward (flagging, not failing, when the iterate leaves
// |x| <= alpha); Picard mode iterates from picard_initial and throws
// DomainExit if an iterate leaves the certified domain.
SolveReport solve_nonlinear(const NonlinearProblem& p, NonlinearMethod method);

std::vector<double> nonlinear_residuals(const NonlinearProblem& p,
                                        const std::vector<double>& phi);

}  // namespace tsvolterra
