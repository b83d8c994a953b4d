#pragma once

#include <vector>

#include "poolrisk/model.hpp"
#include "poolrisk/pool_det.hpp"
#include "poolrisk/rootfind.hpp"

namespace poolrisk {

struct net_profit_error : numeric_error {
  using numeric_error::numeric_error;
};

// Smoothed-reward pool: jumps up by B ~ comb-exp at rate lambda, down by
// W ~ comb-exp at rate mu_d, horizon exponential with mean t. Solutions
// have the form
//   sum_k coef[k] * exp(-roots[k] * u)  (+ u + d0 for the Value kind)
// for real u >= 0.
struct StochPoolSolution {
  SolutionKind kind = SolutionKind::Value;
  std::vector<cd> roots;  // decay rates, Re > 0, conjugate-paired
  std::vector<cd> coef;
  CombExp W;
  CombExp B;
  double lambda = 0, mu_d = 0, t = 0;
  double d0 = 0;  // t*(lambda*E[B] - mu_d*E[W])
  bool direct_fallback = false;

  // Value: 0 for u < 0. RuinProb: 1 for u < 0.
  double at(double u) const;
};

StochPoolSolution solve_value_stoch(double lambda, double mu_d, double t,
                                    const CombExp& W, const CombExp& B);
StochPoolSolution solve_ruin_stoch(double lambda, double mu_d, double t,
                                   const CombExp& W, const CombExp& B);

// reward jumps are the payout law enlarged by a = b/w
StochPoolSolution solve_value_stoch(const PoolParams& p, const CombExp& W,
                                    double a);
StochPoolSolution solve_ruin_stoch(const PoolParams& p, const CombExp& W,
                                   double a);

// single-exponential closed forms, W ~ exp(alpha), B ~ exp(beta)
double lundberg_R_exp1(double lambda, double mu_d, double t, double alpha,
                       double beta);
double value_exp1(double u, double lambda, double mu_d, double t, double alpha,
                  double beta);
double ruin_exp1(double u, double lambda, double mu_d, double t, double alpha,
                 double beta);

// infinite-horizon ruin probability for exponential jumps both ways;
// requires positive drift lambda/beta > mu_d/alpha
double psi_infinite_exp(double u, double lambda, double mu_d, double alpha,
                        double beta);

// Max relative residual of the defining integral equation
//   (lambda+mu_d+1/t)*S(u) = inhom(u) + lambda*E[S(u+B)]
//                            + mu_d*int_0^u S(u-x) f_W(x) dx + tail(u)
// with inhom = u/t, tail = 0 for Value and inhom = 0,
// tail = mu_d*(1-F_W(u)) for RuinProb, checked by quadrature at each u.
struct StochResidualReport {
  double max_rel = 0;
  double argmax = 0;
};
StochResidualReport integral_equation_residual(const StochPoolSolution& sol,
                                               const std::vector<double>& us);

}  // namespace poolrisk
