#include "poolrisk/mc.hpp"

#include <algorithm>
#include <cmath>

namespace poolrisk {

namespace {

struct Accum {
  double sum = 0, comp = 0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double total() const { return sum + comp; }
};

struct PathOut {
  double value = 0;
  bool ruined = false;
  double uncond = 0;
};

SimEstimate from_moments(const Accum& a1, const Accum& a2, long long n) {
  SimEstimate e;
  e.mean = a1.total() / static_cast<double>(n);
  if (n > 1) {
    const double sv =
        std::max(0.0, a2.total() - static_cast<double>(n) * e.mean * e.mean) /
        static_cast<double>(n - 1);
    e.se = std::sqrt(sv / static_cast<double>(n));
  }
  return e;
}

template <class PathFn>
SimResult run_sim(const SimOptions& opt, PathFn&& one) {
  if (opt.n_paths < 1) throw invalid_params("need at least one path");
  constexpr long long kChunk = 65536;
  Accum av1, av2, au1, au2;
  long long ruin_count = 0;
  long long done = 0;
  while (done < opt.n_paths) {
    const long long m = std::min(kChunk, opt.n_paths - done);
    double c1 = 0, c2 = 0, cu1 = 0, cu2 = 0;
    long long cr = 0;
    for (long long i = 0; i < m; ++i) {
      Rng rng(opt.seed, static_cast<uint64_t>(done + i));
      const PathOut o = one(rng);
      c1 += o.value;
      c2 += o.value * o.value;
      cr += o.ruined ? 1 : 0;
      if (opt.track_unconditional) {
        cu1 += o.uncond;
        cu2 += o.uncond * o.uncond;
      }
    }
    av1.add(c1);
    av2.add(c2);
    au1.add(cu1);
    au2.add(cu2);
    ruin_count += cr;
    done += m;
  }

  SimResult out;
  out.n_paths = opt.n_paths;
  out.seed = opt.seed;
  out.value = from_moments(av1, av2, opt.n_paths);
  const double p = static_cast<double>(ruin_count) /
                   static_cast<double>(opt.n_paths);
  out.ruin.mean = p;
  out.ruin.se = opt.n_paths > 1
                    ? std::sqrt(p * (1.0 - p) /
                                static_cast<double>(opt.n_paths - 1))
                    : 0.0;
  if (opt.track_unconditional) {
    out.unconditional = from_moments(au1, au2, opt.n_paths);
    out.has_unconditional = true;
  }
  return out;
}

SimResult ruined_at_start(const SimOptions& opt) {
  SimResult out;
  out.n_paths = opt.n_paths;
  out.seed = opt.seed;
  out.ruin.mean = 1.0;
  return out;
}

double draw_horizon(Rng& rng, const SimOptions& opt, double t) {
  return opt.horizon == Horizon::Fixed ? t : -t * std::log(rng.uniform());
}

}  // namespace

double sample_comb_exp(const CombExp& law, Rng& rng) {
  const size_t n = law.rates.size();
  if (n == 1) return rng.exponential(law.rates[0]);
  bool all_positive = true;
  for (double w : law.weights) all_positive &= w > 0;
  if (all_positive) {
    const double u = rng.uniform();
    double acc = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
      acc += law.weights[i];
      if (u <= acc) return rng.exponential(law.rates[i]);
    }
    return rng.exponential(law.rates[n - 1]);
  }
  // signed weights: invert the CDF, which is monotone because the
  // density is nonnegative
  const double u = rng.uniform();
  double lo = 0, hi = 60.0 / law.rates.front();
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(law, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SimResult simulate_pool_det(const PoolParams& p, const SimOptions& opt) {
  if (!(p.lambda > 0) || !(p.mu_d > 0))
    throw invalid_params("jump rates must be positive");
  if (p.w <= 0 || p.b <= p.w) throw invalid_params("need b > w > 0");
  if (!(p.t > 0)) throw invalid_params("horizon must be positive");
  if (p.u < 0) return ruined_at_start(opt);

  const double total = p.lambda + p.mu_d;
  const double p_up = p.lambda / total;
  const double up = static_cast<double>(p.b - p.w);
  const double down = static_cast<double>(p.w);
  return run_sim(opt, [&](Rng& rng) {
    const double T = draw_horizon(rng, opt, p.t);
    double x = p.u;
    bool ruined = false;
    double time = 0;
    while (true) {
      time += rng.exponential(total);
      if (time >= T) break;
      if (rng.uniform() <= p_up) {
        x += up;
      } else {
        x -= down;
        if (x < 0 && !ruined) {
          ruined = true;
          if (!opt.track_unconditional) break;
        }
      }
    }
    return PathOut{ruined ? 0.0 : x, ruined, x};
  });
}

SimResult simulate_pool_stoch(const PoolParams& p, const CombExp& W,
                              const CombExp& B, const SimOptions& opt) {
  if (!(p.lambda > 0) || !(p.mu_d > 0))
    throw invalid_params("jump rates must be positive");
  if (!(p.t > 0)) throw invalid_params("horizon must be positive");
  if (p.u < 0) return ruined_at_start(opt);

  const double total = p.lambda + p.mu_d;
  const double p_up = p.lambda / total;
  return run_sim(opt, [&](Rng& rng) {
    const double T = draw_horizon(rng, opt, p.t);
    double x = p.u;
    bool ruined = false;
    double time = 0;
    while (true) {
      time += rng.exponential(total);
      if (time >= T) break;
      if (rng.uniform() <= p_up) {
        x += sample_comb_exp(B, rng);
      } else {
        x -= sample_comb_exp(W, rng);
        if (x < 0 && !ruined) {
          ruined = true;
          if (!opt.track_unconditional) break;
        }
      }
    }
    return PathOut{ruined ? 0.0 : x, ruined, x};
  });
}

namespace {

template <class JumpFn>
SimResult run_miner(double rate, double c, double u, double t,
                    const SimOptions& opt, JumpFn&& jump) {
  if (!(rate > 0)) throw invalid_params("reward rate must be positive");
  if (!(c > 0)) throw invalid_params("cost rate must be positive");
  if (!(t > 0)) throw invalid_params("horizon must be positive");
  if (u < 0) return ruined_at_start(opt);

  return run_sim(opt, [&](Rng& rng) {
    const double T = draw_horizon(rng, opt, t);
    double x = u;
    bool ruined = false;
    double time = 0;
    while (true) {
      const double s = time + rng.exponential(rate);
      const double stop = std::min(s, T);
      // the drift drains x to zero at time + x/c; crossing before the
      // next event (or the horizon) is ruin
      if (!ruined && x < c * (stop - time)) {
        ruined = true;
        if (!opt.track_unconditional) return PathOut{0.0, true, 0.0};
      }
      if (s >= T) {
        x -= c * (T - time);
        break;
      }
      x -= c * (s - time);
      x += jump(rng);
      time = s;
    }
    return PathOut{ruined ? 0.0 : x, ruined, x};
  });
}

}  // namespace

SimResult simulate_miner_det(double rate, double jump, double c, double u,
                             double t, const SimOptions& opt) {
  if (!(jump > 0)) throw invalid_params("reward jump must be positive");
  return run_miner(rate, c, u, t, opt, [&](Rng&) { return jump; });
}

SimResult simulate_miner_stoch(double rate, const CombExp& W, double c,
                               double u, double t, const SimOptions& opt) {
  return run_miner(rate, c, u, t, opt,
                   [&](Rng& rng) { return sample_comb_exp(W, rng); });
}

}  // namespace poolrisk
