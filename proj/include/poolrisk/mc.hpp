#pragma once

#include <cstdint>

#include "poolrisk/model.hpp"
#include "poolrisk/rng.hpp"

namespace poolrisk {

enum class Horizon { Fixed, ExponentialMean };

struct SimEstimate {
  double mean = 0;
  double se = 0;
  double lo95() const { return mean - 1.96 * se; }
  double hi95() const { return mean + 1.96 * se; }
  bool contains95(double x) const { return x >= lo95() && x <= hi95(); }
};

struct SimResult {
  SimEstimate value;          // E[surplus at T, counted as 0 on ruined paths]
  SimEstimate ruin;           // P(ruin by T)
  SimEstimate unconditional;  // E[surplus at T ignoring ruin], when tracked
  bool has_unconditional = false;
  long long n_paths = 0;
  uint64_t seed = 0;
};

struct SimOptions {
  long long n_paths = 100000;
  uint64_t seed = 1;
  Horizon horizon = Horizon::ExponentialMean;
  // keep simulating ruined paths to T so the drift identity
  // E[surplus] = u + (up rate * mean jump - down rate * mean jump) * E[T]
  // can be checked
  bool track_unconditional = false;
};

// Path streams derive from (seed, path index); identical options give
// bit-identical results. Pool paths can only be ruined at payout jumps;
// miner paths are ruined the moment the cost drift drains the surplus
// below zero between jumps.
SimResult simulate_pool_det(const PoolParams& p, const SimOptions& opt);
SimResult simulate_pool_stoch(const PoolParams& p, const CombExp& W,
                              const CombExp& B, const SimOptions& opt);
SimResult simulate_miner_det(double rate, double jump, double c, double u,
                             double t, const SimOptions& opt);
SimResult simulate_miner_stoch(double rate, const CombExp& W, double c,
                               double u, double t, const SimOptions& opt);

// one draw from a comb-exp law: direct for a single term, mixture for
// all-positive weights, CDF bisection otherwise
double sample_comb_exp(const CombExp& law, Rng& rng);

}  // namespace poolrisk
