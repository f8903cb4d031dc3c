#pragma once

#include <vector>

#include "tsvolterra/second_kind.hpp"

namespace tsvolterra {

// Linear dynamic initial value problem of order n:
//   y^{d^n}(t) + sum_{i=0}^{n-1} p_{n-i}(t) y^{d^i}(t) = q(t)
// with initial data y^{d^i} = y_i given either at s (AtS) or at sigma(s)
// (AtSigmaS). Coefficients are expressions in t; coeffs[k] holds p_{k+1}.
struct LinearIVP {
  enum class Convention { AtS, AtSigmaS };

  TimeScalePtr scale;
  std::size_t order = 0;
  std::vector<expr::Expr> coeffs;  // p_1 .. p_n
  expr::Expr rhs;                  // q
  std::size_t initial_index = 0;   // index of s
  std::vector<double> initial_values;  // y_0 .. y_{n-1}
  Convention convention = Convention::AtS;

  static LinearIVP create(TimeScalePtr scale, std::size_t order,
                          std::vector<expr::Expr> coeffs, expr::Expr rhs, double s,
                          std::vector<double> initial_values,
                          Convention convention = Convention::AtS);
};

// one level y^{d^i} with its admissible index window on the original scale
struct DerivativeGrid {
  std::size_t order = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;                // inclusive
  std::vector<double> values;        // hi - lo + 1 entries

  double at_index(std::size_t idx) const { return values[idx - lo]; }
};

// Substituting phi = y^{d^n} turns the IVP (AtS convention) into a
// second-kind equation with lambda = -1,
//   kernel  K(t, eta) = sum_i p_{n-i}(t) h_{n-i-1}(t, sigma(eta))
//   forcing q(t) - sum_i sum_{k<n-i} y_{k+i} p_{n-i}(t) h_k(t, s)
// on the scale restricted to [s .. t_{N-1-n}].
ProblemSpec ivp_to_volterra(const LinearIVP& ivp);

// Taylor-style reconstruction of every y^{d^i}, i < n, from phi = y^{d^n}
std::vector<DerivativeGrid> taylor_reconstruct(const LinearIVP& ivp, const GridFunction& phi);

// Companion one-step marching; returns levels 0..n (level n read off the
// equation on T^{kappa^n}). Exact on isolated scales.
std::vector<DerivativeGrid> solve_ivp(const LinearIVP& ivp);

// Kernel of polynomial type built from coefficient functions p_1..p_n
struct PolyKernel {
  std::size_t order = 0;
  std::vector<expr::Expr> coeffs;  // p_1 .. p_n

  KernelTable materialize(TimeScalePtr scale) const;
};

struct IvpResolvent {
  KernelTable gamma;       // zero outside the admissible window
  std::size_t max_index = 0;  // entries valid for j <= i <= max_index
};

// Resolvent of a polynomial-type kernel, column by column: for each s the
// homogeneous IVP y^{d^n} - lambda sum p_{n-i} y^{d^i} = 0 with
// y^{d^i}(sigma(s)) = delta_{i,n-1} is marched forward and
// Gamma(lambda; t, s) = y^{d^n}(t) / lambda. Diagonal entries equal K(s, s).
IvpResolvent resolvent_via_ivp(const PolyKernel& k, double lambda, TimeScalePtr scale);

}  // namespace tsvolterra
