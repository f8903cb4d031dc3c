#pragma once

#include <functional>
#include <vector>

#include "tsvolterra/time_scale.hpp"

namespace tsvolterra {

// Delta derivative at a point of T^kappa: (f(sigma(t)) - f(t)) / mu(t).
// Throws KappaBoundary at the last point.
double delta_derivative(const GridFunction& f, double t);

// Delta integral over [s, t): sum of f(eta) * mu(eta). Sign reverses when
// s > t. Both endpoints must be grid points. Exact on isolated scales.
double delta_integral(const GridFunction& f, double s, double t);
double delta_integral_idx(const GridFunction& f, std::size_t s_idx, std::size_t t_idx);

// Generalized monomials h_k(t, s):
//   h_0 = 1,  h_k(t, s) = integral of h_{k-1}(eta, s) over [s, t).
// Both arguments may be any grid points (t < s works through the signed
// integral). h_k(t, s) vanishes once k exceeds the number of points in [s, t).
double monomial(const TimeScale& ts, unsigned k, double t, double s);

// h_k(t_i, t_{s_idx}) for every i, one column of the recursion
std::vector<double> monomial_column(const TimeScale& ts, unsigned k, std::size_t s_idx);

// all columns h_0..h_kmax against a fixed base point; result[k][i] = h_k(t_i, base)
std::vector<std::vector<double>> monomials_up_to(const TimeScale& ts, unsigned kmax,
                                                 std::size_t s_idx);

// Companion recursion h_k(t, s) = integral of h_{k-1}(t, sigma(eta)) over
// [s, t), kept separate so the two can be cross-checked.
double monomial_alt(const TimeScale& ts, unsigned k, double t, double s);

// Generalized exponential e_p(t, s) as the finite product of (1 + p*mu) over
// [s, t); reciprocal for t < s. Throws NotRegressive when a factor vanishes
// (within 1e-14).
double exp_general(const GridFunction& p, double t, double s);
double exp_constant(const TimeScale& ts, double lambda, double t, double s);

// circle arithmetic for a graininess value h
double circle_plus(double z, double w, double h);
double circle_minus(double z, double w, double h);  // DivisionByZero when 1 + w*h = 0

struct TrigPair {
  double cos_value;
  double sin_value;
};

// cos_lambda / sin_lambda advanced jointly from (1, 0) at s:
//   c <- c - lambda*mu*sn,  sn <- sn + lambda*mu*c.
// Requires t >= s (BackwardUnsupported otherwise).
TrigPair trig(const TimeScale& ts, double lambda, double t, double s);

// m_lambda(t, s) = integral of 1 / (1 + lambda*mu(eta)) over [s, t)
double mfunc(const TimeScale& ts, double lambda, double t, double s);

struct OrderCheck {
  double lhs;  // integral over a<=eta<b of integral over a<=xi<eta
  double rhs;  // integral over a<=xi<b of integral over sigma(xi)<=eta<b
};

// Evaluates both sides of the change-of-integration-order identity for a
// two-variable integrand; the two must agree on every isolated scale.
OrderCheck change_of_order_check(const TimeScale& ts,
                                 const std::function<double(double, double)>& f,
                                 double a, double b);

}  // namespace tsvolterra
