#include "poolrisk/pool_stoch.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>

namespace poolrisk {

namespace {

StochPoolSolution build(double lambda, double mu_d, double t, const CombExp& W,
                        const CombExp& B, SolutionKind kind) {
  StochPoolSolution sol;
  sol.kind = kind;
  sol.W = W;
  sol.B = B;
  sol.lambda = lambda;
  sol.mu_d = mu_d;
  sol.t = t;
  sol.d0 = t * (lambda * mean(B) - mu_d * mean(W));

  RootSet rs = lundberg_roots(lambda, mu_d, t, W, B);
  sol.roots = rs.roots;

  // matching the exp(-alpha_j u) terms of the renewal equation gives a
  // Cauchy system in the surviving decay rates
  const size_t n = W.rates.size();
  std::vector<cd> rhs(n);
  for (size_t j = 0; j < n; ++j) {
    const double a = W.rates[j];
    rhs[j] = kind == SolutionKind::Value ? 1.0 / (a * a) - sol.d0 / a
                                         : 1.0 / a;
  }
  CauchySolution cs = solve_cauchy(W.rates, sol.roots, rhs);
  sol.coef = cs.coef;
  sol.direct_fallback = cs.direct_fallback;
  return sol;
}

}  // namespace

double StochPoolSolution::at(double u) const {
  if (u < 0) return kind == SolutionKind::Value ? 0.0 : 1.0;
  double s = 0;
  for (size_t k = 0; k < roots.size(); ++k) {
    const cd& r = roots[k];
    if (r.imag() > 0) {
      s += 2.0 * (coef[k] * std::exp(-r * u)).real();
    } else if (r.imag() == 0) {
      s += coef[k].real() * std::exp(-r.real() * u);
    }
    // negative-imag members are covered by their conjugate partners
  }
  if (kind == SolutionKind::Value) s += u + d0;
  return s;
}

StochPoolSolution solve_value_stoch(double lambda, double mu_d, double t,
                                    const CombExp& W, const CombExp& B) {
  return build(lambda, mu_d, t, W, B, SolutionKind::Value);
}

StochPoolSolution solve_ruin_stoch(double lambda, double mu_d, double t,
                                   const CombExp& W, const CombExp& B) {
  return build(lambda, mu_d, t, W, B, SolutionKind::RuinProb);
}

StochPoolSolution solve_value_stoch(const PoolParams& p, const CombExp& W,
                                    double a) {
  return build(p.lambda, p.mu_d, p.t, W, scale_comb_exp(W, a),
               SolutionKind::Value);
}

StochPoolSolution solve_ruin_stoch(const PoolParams& p, const CombExp& W,
                                   double a) {
  return build(p.lambda, p.mu_d, p.t, W, scale_comb_exp(W, a),
               SolutionKind::RuinProb);
}

double lundberg_R_exp1(double lambda, double mu_d, double t, double alpha,
                       double beta) {
  const double Lam = lambda + mu_d + 1.0 / t;
  const double qa = Lam;
  const double qb = -lambda * beta + mu_d * alpha - Lam * (alpha - beta);
  const double qc = -alpha * beta / t;
  // qc < 0, so the two roots straddle zero; take the positive one
  const double sq = std::sqrt(qb * qb - 4.0 * qa * qc);
  const double q = -0.5 * (qb + (qb >= 0 ? sq : -sq));
  // qb loses digits to cancellation; finish on the rational form in
  // extended precision so the root is good to the last double bit
  long double r = std::max(q / qa, qc / q);
  const long double lb = static_cast<long double>(lambda) * beta;
  const long double ma = static_cast<long double>(mu_d) * alpha;
  for (int it = 0; it < 8; ++it) {
    const long double db = static_cast<long double>(beta) + r;
    const long double da = static_cast<long double>(alpha) - r;
    const long double v = lb / db + ma / da - static_cast<long double>(Lam);
    const long double dv = -lb / (db * db) + ma / (da * da);
    if (dv == 0.0L) break;
    const long double step = v / dv;
    r -= step;
    if (std::abs(step) <= 1e-19L * (1.0L + std::abs(r))) break;
  }
  return static_cast<double>(r);
}

double value_exp1(double u, double lambda, double mu_d, double t, double alpha,
                  double beta) {
  if (u < 0) return 0;
  const double R = lundberg_R_exp1(lambda, mu_d, t, alpha, beta);
  const double d0 = t * (lambda / beta - mu_d / alpha);
  const double C = (1.0 / (alpha * alpha) - d0 / alpha) * (alpha - R);
  return C * std::exp(-R * u) + u + d0;
}

double ruin_exp1(double u, double lambda, double mu_d, double t, double alpha,
                 double beta) {
  if (u < 0) return 1;
  const double R = lundberg_R_exp1(lambda, mu_d, t, alpha, beta);
  return (1.0 - R / alpha) * std::exp(-R * u);
}

double psi_infinite_exp(double u, double lambda, double mu_d, double alpha,
                        double beta) {
  if (!(lambda * alpha > mu_d * beta))
    throw net_profit_error(
        "mean income does not exceed mean payout, ruin is certain");
  if (u < 0) return 1;
  const double R = (lambda * alpha - mu_d * beta) / (lambda + mu_d);
  return (1.0 - R / alpha) * std::exp(-R * u);
}

StochResidualReport integral_equation_residual(const StochPoolSolution& sol,
                                               const std::vector<double>& us) {
  using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double Lam = sol.lambda + sol.mu_d + 1.0 / sol.t;
  const double x_max = 60.0 / sol.B.rates.front();
  StochResidualReport rep;
  for (double u : us) {
    const double su = sol.at(u);
    const double up = quad::integrate(
        [&](double x) { return sol.at(u + x) * pdf(sol.B, x); }, 0.0, x_max,
        15, 1e-10);
    double dn = 0;
    if (u > 0)
      dn = quad::integrate(
          [&](double x) { return sol.at(u - x) * pdf(sol.W, x); }, 0.0, u, 15,
          1e-10);
    double total = -Lam * su + sol.lambda * up + sol.mu_d * dn;
    if (sol.kind == SolutionKind::Value)
      total += u / sol.t;
    else
      total += sol.mu_d * tail(sol.W, u);
    const double rel = std::abs(total) / std::max(1.0, std::abs(Lam * su));
    if (rel > rep.max_rel) {
      rep.max_rel = rel;
      rep.argmax = u;
    }
  }
  return rep;
}

}  // namespace poolrisk
