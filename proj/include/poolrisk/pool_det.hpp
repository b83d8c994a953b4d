#pragma once

#include <vector>

#include "poolrisk/model.hpp"
#include "poolrisk/rootfind.hpp"

namespace poolrisk {

enum class SolutionKind { Value, RuinProb };

// Expected surplus or ruin probability at an exponentially distributed
// horizon for the pool process with fixed integer jump sizes b (up, net
// b-w at block instants) and w (down). Solutions have the form
//   sum_i coef[i] * roots[i]^u  (+ u + d0 for the Value kind)
// on the integer lattice u >= 0.
struct DetPoolSolution {
  SolutionKind kind = SolutionKind::Value;
  std::vector<cd> roots;  // interior characteristic roots, conjugate-paired
  std::vector<cd> coef;
  double lambda = 0, mu_d = 0, t = 0;
  int b = 0, w = 0;
  double d0 = 0;  // lambda*b*t - (lambda+mu_d)*w*t

  // Value: 0 for u < 0. RuinProb: 1 for u < 0.
  double at(long long u) const;
};

DetPoolSolution solve_value_det(const PoolParams& p,
                                const CharRootOptions& opt = {});
DetPoolSolution solve_ruin_det(const PoolParams& p,
                               const CharRootOptions& opt = {});
// share one characteristic root set between both solutions
DetPoolSolution solve_value_det(const PoolParams& p, const RootSet& roots);
DetPoolSolution solve_ruin_det(const PoolParams& p, const RootSet& roots);

// Max relative residual of the defining lattice recursion
//   lambda*S(u+b-w) - (lambda+mu_d+1/t)*S(u) + mu_d*S(u-w) + inhom(u) = 0
// with inhom = u/t for Value and 0 for RuinProb, over u in [u_lo, u_hi].
struct DetResidualReport {
  double max_rel = 0;
  long long argmax = 0;
};
DetResidualReport recursion_residual(const DetPoolSolution& sol, long long u_lo,
                                     long long u_hi);

// Smallest integer u >= 0 with sol.at(u) < level (sol nonincreasing in u).
long long smallest_u_below(const DetPoolSolution& sol, double level,
                           long long u_cap = 4'000'000);

}  // namespace poolrisk
