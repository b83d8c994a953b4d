#pragma once

#include "poolrisk/model.hpp"
#include "poolrisk/rootfind.hpp"

namespace poolrisk {

enum class MinerMode { Solo, Pooled };

// Dual risk process: continuous cost drain c per hour, reward jumps of
// fixed size at Poisson rate. Pooled mode is (rate = p_i*mu, jump = w),
// solo mode is (rate = p_i*lambda, jump = b); one solver, two
// parameterizations.
struct MinerDetSolution {
  MinerMode mode = MinerMode::Pooled;
  double rate = 0, jump = 0, c = 0, t = 0;
  double rho = 0;           // negative root of -c*r + rate*(e^{jump*r}-1) = 1/t
  bool net_profit = false;  // rate*jump > c

  double value(double u) const;  // u + (rate*jump - c)*t*(1 - e^{rho*u})
  double ruin(double u) const;   // e^{rho*u}
};

MinerDetSolution miner_det(double rate, double jump, double c, double t,
                           MinerMode mode);
MinerDetSolution miner_det_pooled(const MinerParams& m, double w);
MinerDetSolution miner_det_solo(const MinerParams& m, double b);

// Same process with comb-exp distributed reward jumps.
struct MinerStochSolution {
  MinerMode mode = MinerMode::Pooled;
  double rate = 0, c = 0, t = 0;
  CombExp W;
  double R = 0;     // positive root of c*R + rate*E[e^{-R W}] = 1/t + rate
  double gain = 0;  // rate*E[W] - c
  bool net_profit = false;

  double value(double u) const;  // u + gain*t*(1 - e^{-R*u})
  double ruin(double u) const;   // e^{-R*u}
};

MinerStochSolution miner_stoch(double rate, const CombExp& W, double c,
                               double t, MinerMode mode);
MinerStochSolution miner_stoch_pooled(const MinerParams& m, const CombExp& W);
MinerStochSolution miner_stoch_solo(const MinerParams& m, const CombExp& B);

// positive branch of c*R^2 + (alpha*c - 1/t - rate)*R - alpha/t = 0
double miner_R_exp1(double rate, double alpha, double c, double t);

// Initial capital where the pooled and solo expected-surplus curves
// cross: below it the pooled curve is higher, above it the solo one is.
double break_even_capital(const MinerDetSolution& pooled,
                          const MinerDetSolution& solo, double u_max = 1e7);
double break_even_capital(const MinerStochSolution& pooled,
                          const MinerStochSolution& solo, double u_max = 1e7);

}  // namespace poolrisk
