#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace poolrisk {

struct invalid_params : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Block and share arrival rates for the whole network. A share is the
// easier proof-of-work unit; q is the relative difficulty of a block
// versus a share, so block arrivals are a q-thinning of share arrivals.
struct NetworkParams {
  double lambda = 0;  // block rate, blocks/hour
  double mu = 0;      // share rate, shares/hour
  double q = 0;       // relative difficulty, lambda = q*mu, 0 < q < 1
};

NetworkParams network_from_shares(double mu, double q);
// validates lambda == q*mu within tol
NetworkParams network_checked(double lambda, double mu, double q, double tol = 1e-9);

// Pay-per-share pool manager parameters. The manager pays w per share as
// it arrives and collects the block reward b at block times. Since every
// block is itself a share, the payout stream at block instants cancels
// into the block jump; mu_d = mu - lambda is the rate of the remaining
// pure-payout jumps.
struct PoolParams {
  double lambda = 0;   // pool block rate = p_I * network lambda
  double mu_d = 0;     // compensated payout rate = p_I * network mu - lambda
  double mu = 0;       // pool share rate = lambda + mu_d
  int b = 0;           // block reward, integer money units
  int w = 0;           // payout per share, integer money units (rounded)
  double w_exact = 0;  // (1-f)*b*q before rounding
  double u = 0;        // initial surplus, money units
  double t = 0;        // mean time horizon, hours
  double p_I = 0;      // pool share of network hashpower, (0,1]
  double f = 0;        // pool fee, [0,1)
  bool net_profit = false;  // lambda*b > mu*w, reported but not enforced
};

PoolParams derive_pool_params(const NetworkParams& net, double p_I, double f,
                              int b, double u, double t);

// Density sum_i weights[i]*rates[i]*exp(-rates[i]*x) on x >= 0.
// Weights sum to 1 and may be negative; rates are strictly increasing.
// Nonnegativity of the density is checked on a 10,000-point log-spaced
// grid at construction; values below -1e-12 are rejected, values in
// [-1e-12, 0) are clamped in pdf() only.
struct CombExp {
  std::vector<double> weights;
  std::vector<double> rates;
  int n() const { return static_cast<int>(rates.size()); }
};

CombExp make_comb_exp(std::vector<double> weights, std::vector<double> rates);
CombExp exponential_law(double rate);
// law of a*X for X ~ law; a > 1 (reward scaling is an enlargement)
CombExp scale_comb_exp(const CombExp& law, double a);

double mean(const CombExp& law);
double pdf(const CombExp& law, double x);
double cdf(const CombExp& law, double x);
double tail(const CombExp& law, double x);     // 1 - cdf
double laplace(const CombExp& law, double s);  // E[exp(-s X)], s > -rates[0]

// Individual miner parameters. Pooled mode earns the per-share reward at
// the miner's full share rate p_i*mu (block instants included, unlike the
// manager's compensated mu_d); solo mode earns the block reward at rate
// p_i*lambda. Costs drain continuously at c per hour.
struct MinerParams {
  double p_i = 0;      // miner share of network hashpower
  double c = 0;        // operating cost, money units/hour
  double mu = 0;       // network share rate
  double lambda = 0;   // network block rate
  double u = 0;        // initial surplus
  double t = 0;        // mean time horizon, hours
};

// c = p_i * (annual_kwh/8766) * usd_per_kwh / usd_per_unit
double electricity_cost_per_hour(double p_i, double annual_kwh,
                                 double usd_per_kwh, double usd_per_unit);

}  // namespace poolrisk
