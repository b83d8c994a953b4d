#include "poolrisk/miner.hpp"

#include <cmath>
#include <utility>

namespace poolrisk {

namespace {

void check_common(double rate, double c, double t) {
  if (!(rate > 0)) throw invalid_params("reward rate must be positive");
  if (!(c > 0)) throw invalid_params("cost rate must be positive");
  if (!(t > 0)) throw invalid_params("mean horizon must be positive");
}

}  // namespace

double MinerDetSolution::value(double u) const {
  if (u < 0) return 0;
  return u + (rate * jump - c) * t * (1.0 - std::exp(rho * u));
}

double MinerDetSolution::ruin(double u) const {
  if (u < 0) return 1;
  return std::exp(rho * u);
}

MinerDetSolution miner_det(double rate, double jump, double c, double t,
                           MinerMode mode) {
  check_common(rate, c, t);
  if (!(jump > 0)) throw invalid_params("reward jump must be positive");

  auto g = [&](double r) {
    const double e = std::exp(jump * r);
    return std::make_pair(-c * r + rate * (e - 1.0) - 1.0 / t,
                          -c + rate * jump * e);
  };
  // g(0) = -1/t < 0 and -c*r dominates on the far left; widen until the
  // sign flips
  double lo = -1.0 / jump;
  int widen = 0;
  while (g(lo).first <= 0) {
    lo *= 2;
    if (++widen > 200)
      throw no_root_error("no negative decay exponent (is the cost zero?)");
  }

  MinerDetSolution sol;
  sol.mode = mode;
  sol.rate = rate;
  sol.jump = jump;
  sol.c = c;
  sol.t = t;
  sol.rho = find_root(g, lo, 0.0);
  sol.net_profit = rate * jump > c;
  return sol;
}

MinerDetSolution miner_det_pooled(const MinerParams& m, double w) {
  return miner_det(m.p_i * m.mu, w, m.c, m.t, MinerMode::Pooled);
}

MinerDetSolution miner_det_solo(const MinerParams& m, double b) {
  return miner_det(m.p_i * m.lambda, b, m.c, m.t, MinerMode::Solo);
}

double MinerStochSolution::value(double u) const {
  if (u < 0) return 0;
  return u + gain * t * (1.0 - std::exp(-R * u));
}

double MinerStochSolution::ruin(double u) const {
  if (u < 0) return 1;
  return std::exp(-R * u);
}

MinerStochSolution miner_stoch(double rate, const CombExp& W, double c,
                               double t, MinerMode mode) {
  check_common(rate, c, t);

  auto h = [&](double r) {
    double lap = 0, dlap = 0;
    for (size_t j = 0; j < W.rates.size(); ++j) {
      const double a = W.rates[j];
      lap += W.weights[j] * a / (a + r);
      dlap -= W.weights[j] * a / ((a + r) * (a + r));
    }
    return std::make_pair(c * r + rate * lap - (1.0 / t + rate),
                          c + rate * dlap);
  };
  // h(0) = -1/t < 0 and h((rate+1/t)/c) = rate*E[e^{-RW}] > 0
  const double hi = (rate + 1.0 / t) / c;

  MinerStochSolution sol;
  sol.mode = mode;
  sol.rate = rate;
  sol.c = c;
  sol.t = t;
  sol.W = W;
  sol.R = find_root(h, 0.0, hi);
  sol.gain = rate * mean(W) - c;
  sol.net_profit = sol.gain > 0;
  return sol;
}

MinerStochSolution miner_stoch_pooled(const MinerParams& m, const CombExp& W) {
  return miner_stoch(m.p_i * m.mu, W, m.c, m.t, MinerMode::Pooled);
}

MinerStochSolution miner_stoch_solo(const MinerParams& m, const CombExp& B) {
  return miner_stoch(m.p_i * m.lambda, B, m.c, m.t, MinerMode::Solo);
}

double miner_R_exp1(double rate, double alpha, double c, double t) {
  check_common(rate, c, t);
  if (!(alpha > 0)) throw invalid_params("exponential rate must be positive");
  const double qb = alpha * c - 1.0 / t - rate;
  const double qc = -alpha / t;
  const double sq = std::sqrt(qb * qb - 4.0 * c * qc);
  const double q = -0.5 * (qb + (qb >= 0 ? sq : -sq));
  return std::max(q / c, qc / q);
}

double break_even_capital(const MinerDetSolution& pooled,
                          const MinerDetSolution& solo, double u_max) {
  auto diff = [&](double u) {
    const double gp = (pooled.rate * pooled.jump - pooled.c) * pooled.t;
    const double gs = (solo.rate * solo.jump - solo.c) * solo.t;
    const double ep = std::exp(pooled.rho * u);
    const double es = std::exp(solo.rho * u);
    return std::make_pair(gp * (1.0 - ep) - gs * (1.0 - es),
                          -gp * pooled.rho * ep + gs * solo.rho * es);
  };
  double lo = 0, hi = 1;
  // >= 0: a tail where both exponentials underflow is a plateau, not a cross
  while (diff(hi).first >= 0) {
    lo = hi;
    hi *= 2;
    if (hi > u_max)
      throw no_root_error("surplus curves do not cross below the cap");
  }
  if (lo == 0) {
    lo = 1e-6;
    if (diff(lo).first <= 0)
      throw no_root_error("pooled curve never exceeds the solo curve");
  }
  return find_root(diff, lo, hi);
}

double break_even_capital(const MinerStochSolution& pooled,
                          const MinerStochSolution& solo, double u_max) {
  auto diff = [&](double u) {
    const double gp = pooled.gain * pooled.t;
    const double gs = solo.gain * solo.t;
    const double ep = std::exp(-pooled.R * u);
    const double es = std::exp(-solo.R * u);
    return std::make_pair(gp * (1.0 - ep) - gs * (1.0 - es),
                          gp * pooled.R * ep - gs * solo.R * es);
  };
  double lo = 0, hi = 1;
  // >= 0: a tail where both exponentials underflow is a plateau, not a cross
  while (diff(hi).first >= 0) {
    lo = hi;
    hi *= 2;
    if (hi > u_max)
      throw no_root_error("surplus curves do not cross below the cap");
  }
  if (lo == 0) {
    lo = 1e-6;
    if (diff(lo).first <= 0)
      throw no_root_error("pooled curve never exceeds the solo curve");
  }
  return find_root(diff, lo, hi);
}

}  // namespace poolrisk
