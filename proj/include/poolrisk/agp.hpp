#pragma once

#include <cstdint>
#include <vector>

#include "poolrisk/model.hpp"
#include "poolrisk/rootfind.hpp"

namespace poolrisk {

struct insufficient_nodes_error : invalid_params {
  using invalid_params::invalid_params;
};
struct scale_guard_error : numeric_error {
  using numeric_error::numeric_error;
};
struct instability_error : numeric_error {
  using numeric_error::numeric_error;
};

// Abel-Goncharov polynomial of degree n for the node sequence U:
//   G_0(x|U) = 1,
//   G_n(x|U) = x^n - sum_{k<n} C(n,k) * U[k]^{n-k} * G_k(x|U).
// For sorted nodes in (0,1), (-1)^n G_n(0|U) is the probability that all
// n uniform order statistics fall below their respective nodes.
double agp_eval(int n, double x, const std::vector<double>& nodes);

struct RuinDensityEstimate {
  double t = 0;
  double density = 0;
  double se = 0;             // standard error of the sampled part
  int truncation = 0;        // highest up-jump count included
  long long mc_samples = 0;  // samples per series term
};

// smallest N with P[Poisson(lambda_t) > N] < 1e-6
int default_truncation(double lambda_t);

// Density of the ruin time at fixed calendar time for the integer-jump
// pool process: a series over the up-jump count, with the inner
// conditional expectations sampled from the conditioned payout-arrival
// bridge. Desk-scale only; large instances trip the scale guard because
// the polynomial recursion is numerically unstable at depth.
// n_trunc <= 0 selects default_truncation(lambda*time).
RuinDensityEstimate ruin_time_density(const PoolParams& p, double time,
                                      int n_trunc, long long mc_samples,
                                      uint64_t seed);

}  // namespace poolrisk
