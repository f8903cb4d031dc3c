#include "tsvolterra/calculus.hpp"

#include <cmath>
#include <cstdlib>

namespace tsvolterra {

namespace {

#ifndef NDEBUG
// Debug-only fault injection: setting TSVOLTERRA_MUTATE corrupts the monomial
// recursion so the selftest harness can prove it notices broken invariants.
bool mutation_enabled() {
  static const bool on = std::getenv("TSVOLTERRA_MUTATE") != nullptr;
  return on;
}
#endif

}  // namespace

double delta_derivative(const GridFunction& f, double t) {
  const TimeScale& ts = f.scale();
  std::size_t i = ts.index_of(t);
  if (i + 1 >= ts.size())
    throw Error(Errc::KappaBoundary, "delta derivative undefined at the last point");
  return (f[i + 1] - f[i]) / ts.mu_at(i);
}

double delta_integral_idx(const GridFunction& f, std::size_t s_idx, std::size_t t_idx) {
  const TimeScale& ts = f.scale();
  if (s_idx >= ts.size() || t_idx >= ts.size())
    throw Error(Errc::BadArgument, "integral endpoint index out of range");
  bool flip = s_idx > t_idx;
  std::size_t lo = flip ? t_idx : s_idx;
  std::size_t hi = flip ? s_idx : t_idx;
  double acc = 0.0;
  for (std::size_t j = lo; j < hi; ++j) acc += f[j] * ts.mu_at(j);
  return flip ? -acc : acc;
}

double delta_integral(const GridFunction& f, double s, double t) {
  const TimeScale& ts = f.scale();
  return delta_integral_idx(f, ts.index_of(s), ts.index_of(t));
}

std::vector<double> monomial_column(const TimeScale& ts, unsigned k, std::size_t s_idx) {
  if (s_idx >= ts.size()) throw Error(Errc::BadArgument, "monomial base index out of range");
  std::size_t n = ts.size();
  std::vector<double> cur(n, 1.0);  // h_0
  std::vector<double> next(n, 0.0);
  for (unsigned level = 1; level <= k; ++level) {
    next.assign(n, 0.0);
    for (std::size_t i = s_idx; i + 1 < n; ++i) next[i + 1] = next[i] + cur[i] * ts.mu_at(i);
    for (std::size_t i = s_idx; i-- > 0;) next[i] = next[i + 1] - cur[i] * ts.mu_at(i);
    cur.swap(next);
  }
#ifndef NDEBUG
  if (k >= 2 && mutation_enabled()) {
    for (double& v : cur) v *= 1.0 + 1e-3;
  }
#endif
  return cur;
}

std::vector<std::vector<double>> monomials_up_to(const TimeScale& ts, unsigned kmax,
                                                 std::size_t s_idx) {
  std::vector<std::vector<double>> out;
  out.reserve(kmax + 1);
  for (unsigned k = 0; k <= kmax; ++k) out.push_back(monomial_column(ts, k, s_idx));
  return out;
}

double monomial(const TimeScale& ts, unsigned k, double t, double s) {
  std::size_t ti = ts.index_of(t);
  std::size_t si = ts.index_of(s);
  if (k == 0) return 1.0;
  return monomial_column(ts, k, si)[ti];
}

namespace {

// h_k(t, sigma(eta)) expanded recursively; memoised per (k, base) column
double alt_value(const TimeScale& ts, unsigned k, std::size_t t_idx, std::size_t s_idx,
                 std::vector<std::vector<std::vector<double>>>& memo,
                 std::vector<std::vector<std::vector<bool>>>& have) {
  if (k == 0) return 1.0;
  if (have[k][t_idx][s_idx]) return memo[k][t_idx][s_idx];
  bool flip = s_idx > t_idx;
  std::size_t lo = flip ? t_idx : s_idx;
  std::size_t hi = flip ? s_idx : t_idx;
  double acc = 0.0;
  for (std::size_t j = lo; j < hi; ++j) {
    std::size_t sj = j + 1 < ts.size() ? j + 1 : j;  // sigma index
    acc += alt_value(ts, k - 1, t_idx, sj, memo, have) * ts.mu_at(j);
  }
  if (flip) acc = -acc;
  memo[k][t_idx][s_idx] = acc;
  have[k][t_idx][s_idx] = true;
  return acc;
}

}  // namespace

double monomial_alt(const TimeScale& ts, unsigned k, double t, double s) {
  std::size_t ti = ts.index_of(t);
  std::size_t si = ts.index_of(s);
  std::size_t n = ts.size();
  std::vector<std::vector<std::vector<double>>> memo(
      k + 1, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  std::vector<std::vector<std::vector<bool>>> have(
      k + 1, std::vector<std::vector<bool>>(n, std::vector<bool>(n, false)));
  return alt_value(ts, k, ti, si, memo, have);
}

namespace {

double regressive_factor(double p, double mu) {
  double factor = 1.0 + p * mu;
  if (std::fabs(factor) <= 1e-14)
    throw Error(Errc::NotRegressive, "1 + p*mu vanishes on the integration range");
  return factor;
}

}  // namespace

double exp_general(const GridFunction& p, double t, double s) {
  const TimeScale& ts = p.scale();
  std::size_t ti = ts.index_of(t);
  std::size_t si = ts.index_of(s);
  bool flip = si > ti;
  std::size_t lo = flip ? ti : si;
  std::size_t hi = flip ? si : ti;
  double prod = 1.0;
  for (std::size_t j = lo; j < hi; ++j) prod *= regressive_factor(p[j], ts.mu_at(j));
  return flip ? 1.0 / prod : prod;
}

double exp_constant(const TimeScale& ts, double lambda, double t, double s) {
  std::size_t ti = ts.index_of(t);
  std::size_t si = ts.index_of(s);
  bool flip = si > ti;
  std::size_t lo = flip ? ti : si;
  std::size_t hi = flip ? si : ti;
  double prod = 1.0;
  for (std::size_t j = lo; j < hi; ++j) prod *= regressive_factor(lambda, ts.mu_at(j));
  return flip ? 1.0 / prod : prod;
}

double circle_plus(double z, double w, double h) { return z + w + z * w * h; }

double circle_minus(double z, double w, double h) {
  double den = 1.0 + w * h;
  if (std::fabs(den) <= 1e-14)
    throw Error(Errc::DivisionByZero, "circle minus needs 1 + w*h != 0");
  return (z - w) / den;
}

TrigPair trig(const TimeScale& ts, double lambda, double t, double s) {
  std::size_t ti = ts.index_of(t);
  std::size_t si = ts.index_of(s);
  if (ti < si)
    throw Error(Errc::BackwardUnsupported, "trig recursion only advances forward in time");
  double c = 1.0, sn = 0.0;
  for (std::size_t j = si; j < ti; ++j) {
    double lm = lambda * ts.mu_at(j);
    double cn = c - lm * sn;
    double snn = sn + lm * c;
    c = cn;
    sn = snn;
  }
  return TrigPair{c, sn};
}

double mfunc(const TimeScale& ts, double lambda, double t, double s) {
  std::size_t ti = ts.index_of(t);
  std::size_t si = ts.index_of(s);
  bool flip = si > ti;
  std::size_t lo = flip ? ti : si;
  std::size_t hi = flip ? si : ti;
  double acc = 0.0;
  for (std::size_t j = lo; j < hi; ++j) {
    double factor = regressive_factor(lambda, ts.mu_at(j));
    acc += ts.mu_at(j) / factor;
  }
  return flip ? -acc : acc;
}

OrderCheck change_of_order_check(const TimeScale& ts,
                                 const std::function<double(double, double)>& f,
                                 double a, double b) {
  std::size_t ai = ts.index_of(a);
  std::size_t bi = ts.index_of(b);
  if (ai >= bi) throw Error(Errc::BadArgument, "change of order needs a < b");

  double lhs = 0.0;
  for (std::size_t i = ai; i < bi; ++i) {
    double inner = 0.0;
    for (std::size_t j = ai; j < i; ++j) inner += f(ts[i], ts[j]) * ts.mu_at(j);
    lhs += inner * ts.mu_at(i);
  }
  double rhs = 0.0;
  for (std::size_t j = ai; j < bi; ++j) {
    double inner = 0.0;
    for (std::size_t i = j + 1; i < bi; ++i) inner += f(ts[i], ts[j]) * ts.mu_at(i);
    rhs += inner * ts.mu_at(j);
  }
  return OrderCheck{lhs, rhs};
}

}  // namespace tsvolterra
