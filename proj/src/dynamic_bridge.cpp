#include "tsvolterra/dynamic_bridge.hpp"

#include <cmath>

#include "tsvolterra/calculus.hpp"

namespace tsvolterra {

LinearIVP LinearIVP::create(TimeScalePtr scale, std::size_t order,
                            std::vector<expr::Expr> coeffs, expr::Expr rhs, double s,
                            std::vector<double> initial_values, Convention convention) {
  if (!scale) throw Error(Errc::BadArgument, "problem needs a scale");
  if (order == 0) throw Error(Errc::InvalidProblem, "order must be at least 1");
  if (coeffs.size() != order)
    throw Error(Errc::InvalidProblem, "need exactly n coefficient functions p_1..p_n");
  if (initial_values.size() != order)
    throw Error(Errc::InvalidProblem, "need exactly n initial values y_0..y_{n-1}");

  LinearIVP ivp;
  ivp.scale = scale;
  ivp.order = order;
  ivp.coeffs = std::move(coeffs);
  ivp.rhs = std::move(rhs);
  ivp.initial_index = scale->index_of(s);
  ivp.initial_values = std::move(initial_values);
  ivp.convention = convention;

  // y^{d^n} must exist somewhere at or after s
  std::size_t start = ivp.initial_index + (convention == Convention::AtSigmaS ? 1 : 0);
  if (start + order >= scale->size())
    throw Error(Errc::OrderTooHigh, "grid too short for an order-" + std::to_string(order) +
                                        " problem starting there");

  // coefficients and rhs must evaluate on the whole grid
  expr::EvalEnv env;
  env.scale = scale;
  for (double pnt : scale->points()) {
    env.t = pnt;
    for (const auto& c : ivp.coeffs) expr::evaluate(c, env);
    expr::evaluate(ivp.rhs, env);
  }
  return ivp;
}

namespace {

double eval_at(const expr::Expr& e, const TimeScalePtr& scale, double t) {
  expr::EvalEnv env;
  env.scale = scale;
  env.t = t;
  return expr::evaluate(e, env);
}

}  // namespace

ProblemSpec ivp_to_volterra(const LinearIVP& ivp) {
  if (ivp.convention != LinearIVP::Convention::AtS)
    throw Error(Errc::BadArgument, "the bridge expects initial data given at s");
  const TimeScale& ts = *ivp.scale;
  std::size_t big_n = ts.size();
  std::size_t n = ivp.order;
  std::size_t s0 = ivp.initial_index;
  if (big_n < n + 1 || big_n - 1 - n < s0 + 1)
    throw Error(Errc::OrderTooHigh, "grid too short to carry the transformed equation");
  std::size_t last = big_n - 1 - n;  // right edge of T^{kappa^n}

  TimeScalePtr sub = share(ts.restrict_range(s0, last));

  // columns h_k(., sigma(t_j)) are needed per j; build them on the original scale
  KernelTable kt(sub);
  for (std::size_t j = s0; j <= last; ++j) {
    auto h_cols = monomials_up_to(ts, static_cast<unsigned>(n - 1), j + 1 < big_n ? j + 1 : j);
    for (std::size_t i = j; i <= last; ++i) {
      double acc = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        double p_val = eval_at(ivp.coeffs[n - m - 1], ivp.scale, ts[i]);
        acc += p_val * h_cols[n - m - 1][i];
      }
      kt.set(i - s0, j - s0, acc);
    }
  }

  auto h_from_s = monomials_up_to(ts, static_cast<unsigned>(n - 1), s0);
  std::vector<double> fv(last - s0 + 1, 0.0);
  for (std::size_t i = s0; i <= last; ++i) {
    double acc = eval_at(ivp.rhs, ivp.scale, ts[i]);
    for (std::size_t m = 0; m < n; ++m) {
      double p_val = eval_at(ivp.coeffs[n - m - 1], ivp.scale, ts[i]);
      for (std::size_t k = 0; k + m < n; ++k)
        acc -= ivp.initial_values[k + m] * p_val * h_from_s[k][i];
    }
    fv[i - s0] = acc;
  }
  return ProblemSpec::from_tables(sub, -1.0, std::move(kt), GridFunction(sub, std::move(fv)));
}

std::vector<DerivativeGrid> taylor_reconstruct(const LinearIVP& ivp, const GridFunction& phi) {
  if (ivp.convention != LinearIVP::Convention::AtS)
    throw Error(Errc::BadArgument, "reconstruction expects initial data given at s");
  const TimeScale& ts = *ivp.scale;
  std::size_t big_n = ts.size();
  std::size_t n = ivp.order;
  std::size_t s0 = ivp.initial_index;
  std::size_t phi_last = big_n - 1 - n;
  if (phi.size() != phi_last - s0 + 1)
    throw Error(Errc::GridMismatch, "phi must live on the restricted scale of the bridge");

  auto h_from_s = monomials_up_to(ts, static_cast<unsigned>(n - 1), s0);
  std::vector<DerivativeGrid> out;
  for (std::size_t i = 0; i < n; ++i) {
    DerivativeGrid g;
    g.order = i;
    g.lo = s0;
    g.hi = big_n - 1 - i;
    g.values.assign(g.hi - g.lo + 1, 0.0);
    for (std::size_t idx = g.lo; idx <= g.hi; ++idx) {
      double acc = 0.0;
      for (std::size_t k = 0; k + i < n; ++k)
        acc += ivp.initial_values[k + i] * h_from_s[k][idx];
      // the integrand h_{n-i-1}(t, sigma(eta)) phi(eta) vanishes structurally
      // wherever phi's domain has ended, so the sum stops at phi_last
      std::size_t lim = std::min(idx, phi_last + 1);
      for (std::size_t j = s0; j < lim; ++j) {
        double h_val = monomial(ts, static_cast<unsigned>(n - i - 1), ts[idx], ts.sigma_at(j));
        acc += h_val * phi[j - s0] * ts.mu_at(j);
      }
      g.values[idx - g.lo] = acc;
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<DerivativeGrid> solve_ivp(const LinearIVP& ivp) {
  const TimeScale& ts = *ivp.scale;
  std::size_t big_n = ts.size();
  std::size_t n = ivp.order;
  std::size_t start = ivp.initial_index +
                      (ivp.convention == LinearIVP::Convention::AtSigmaS ? 1 : 0);
  if (start + n >= big_n) throw Error(Errc::OrderTooHigh, "grid too short to march the system");

  std::vector<DerivativeGrid> levels(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    levels[i].order = i;
    levels[i].lo = start;
    levels[i].hi = big_n - 1 - i;
    levels[i].values.assign(levels[i].hi - start + 1, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) levels[i].values[0] = ivp.initial_values[i];

  for (std::size_t m = start; m <= big_n - 1 - n; ++m) {
    // read y^{d^n}(t_m) off the equation, then advance every level one step
    double acc = eval_at(ivp.rhs, ivp.scale, ts[m]);
    for (std::size_t i = 0; i < n; ++i) {
      double p_val = eval_at(ivp.coeffs[n - i - 1], ivp.scale, ts[m]);
      acc -= p_val * levels[i].values[m - start];
    }
    levels[n].values[m - start] = acc;
    double mu = ts.mu_at(m);
    for (std::size_t i = 0; i < n; ++i) {
      if (m + 1 <= levels[i].hi)
        levels[i].values[m + 1 - start] =
            levels[i].values[m - start] + mu * levels[i + 1].values[m - start];
    }
  }
  // levels below n-1 keep marching past T^{kappa^n} using already-known upper levels
  for (std::size_t m = big_n - n; m + 1 < big_n; ++m) {
    double mu = ts.mu_at(m);
    for (std::size_t i = 0; i < n; ++i) {
      if (m >= levels[i + 1].lo && m <= levels[i + 1].hi && m + 1 <= levels[i].hi)
        levels[i].values[m + 1 - start] =
            levels[i].values[m - start] + mu * levels[i + 1].values[m - start];
    }
  }
  return levels;
}

KernelTable PolyKernel::materialize(TimeScalePtr scale) const {
  if (!scale) throw Error(Errc::BadArgument, "kernel needs a scale");
  if (coeffs.size() != order)
    throw Error(Errc::InvalidProblem, "polynomial kernel needs exactly n coefficients");
  const TimeScale& ts = *scale;
  std::size_t big_n = ts.size();
  KernelTable kt(scale);
  for (std::size_t j = 0; j < big_n; ++j) {
    auto h_cols =
        monomials_up_to(ts, static_cast<unsigned>(order - 1), j + 1 < big_n ? j + 1 : j);
    for (std::size_t i = j; i < big_n; ++i) {
      double acc = 0.0;
      for (std::size_t m = 0; m < order; ++m) {
        double p_val = eval_at(coeffs[order - m - 1], scale, ts[i]);
        acc += p_val * h_cols[order - m - 1][i];
      }
      kt.set(i, j, acc);
    }
  }
  return kt;
}

IvpResolvent resolvent_via_ivp(const PolyKernel& k, double lambda, TimeScalePtr scale) {
  if (lambda == 0.0)
    throw Error(Errc::LambdaZero, "the resolvent-through-IVP route divides by lambda");
  if (!scale) throw Error(Errc::BadArgument, "resolvent needs a scale");
  const TimeScale& ts = *scale;
  std::size_t big_n = ts.size();
  std::size_t n = k.order;
  if (big_n < n + 2) throw Error(Errc::OrderTooHigh, "grid too short for this kernel order");
  std::size_t max_index = big_n - 1 - n;

  KernelTable direct_kernel = k.materialize(scale);

  IvpResolvent out;
  out.gamma = KernelTable(scale);
  out.max_index = max_index;

  // y^{d^n} - lambda sum p_{n-i} y^{d^i} = 0 in standard form has
  // coefficients -lambda p_k
  std::vector<expr::Expr> scaled;
  scaled.reserve(n);
  for (const auto& c : k.coeffs)
    scaled.push_back(expr::binary(expr::BinOp::Mul, expr::number(-lambda), c));

  for (std::size_t j = 0; j <= max_index; ++j) {
    out.gamma.set(j, j, direct_kernel.at(j, j));
    if (j + 1 > max_index) continue;
    std::vector<double> init(n, 0.0);
    init[n - 1] = 1.0;
    LinearIVP ivp = LinearIVP::create(scale, n, scaled, expr::number(0.0), ts[j],
                                      std::move(init), LinearIVP::Convention::AtSigmaS);
    auto levels = solve_ivp(ivp);
    const DerivativeGrid& top = levels[n];
    for (std::size_t i = j + 1; i <= max_index; ++i)
      out.gamma.set(i, j, top.at_index(i) / lambda);
  }
  return out;
}

}  // namespace tsvolterra
