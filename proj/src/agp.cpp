#include "poolrisk/agp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poolrisk/rng.hpp"

namespace poolrisk {

namespace {

std::vector<std::vector<double>> binomials(int n) {
  std::vector<std::vector<double>> c(n + 1);
  for (int m = 0; m <= n; ++m) {
    c[m].assign(m + 1, 1.0);
    for (int k = 1; k < m; ++k) c[m][k] = c[m - 1][k - 1] + c[m - 1][k];
  }
  return c;
}

// fills g[0..n] with G_m(x|nodes); false when a value exceeds the guard.
// pw[k] tracks nodes[k]^{m-k} across rows so no pow calls are needed.
bool column(int n, double x, const std::vector<double>& nodes,
            const std::vector<std::vector<double>>& binom, double guard,
            std::vector<double>& g, std::vector<double>& pw) {
  g.assign(n + 1, 0.0);
  pw.assign(n, 0.0);
  g[0] = 1.0;
  double xm = 1.0;
  for (int m = 1; m <= n; ++m) {
    xm *= x;
    for (int k = 0; k < m - 1; ++k) pw[k] *= nodes[k];
    pw[m - 1] = nodes[m - 1];
    double acc = xm;
    const auto& row = binom[m];
    for (int k = 0; k < m; ++k) acc -= row[k] * pw[k] * g[k];
    g[m] = acc;
    if (!(std::abs(acc) <= guard)) return false;
  }
  return true;
}

}  // namespace

double agp_eval(int n, double x, const std::vector<double>& nodes) {
  if (n < 0) throw invalid_params("polynomial degree must be nonnegative");
  if (static_cast<int>(nodes.size()) < n)
    throw insufficient_nodes_error("degree " + std::to_string(n) + " needs " +
                                   std::to_string(n) + " nodes, got " +
                                   std::to_string(nodes.size()));
  const auto binom = binomials(n);
  std::vector<double> g, pw;
  column(n, x, nodes, binom, std::numeric_limits<double>::infinity(), g, pw);
  return g[n];
}

int default_truncation(double lambda_t) {
  if (!(lambda_t >= 0)) throw invalid_params("mean jump count must be >= 0");
  double pmf = std::exp(-lambda_t);
  double cum = pmf;
  int n = 0;
  while (1.0 - cum >= 1e-6 && n < 100000) {
    ++n;
    pmf *= lambda_t / n;
    cum += pmf;
  }
  return n;
}

RuinDensityEstimate ruin_time_density(const PoolParams& p, double time,
                                      int n_trunc, long long mc_samples,
                                      uint64_t seed) {
  if (!(p.lambda > 0) || !(p.mu_d > 0))
    throw invalid_params("jump rates must be positive");
  if (p.w <= 0 || p.b <= p.w) throw invalid_params("need b > w > 0");
  if (!(p.u >= 0)) throw invalid_params("initial capital must be >= 0");
  if (!(time > 0)) throw invalid_params("time must be positive");
  if (mc_samples < 1) throw invalid_params("need at least one sample");

  const double lt = p.lambda * time;
  const int N = n_trunc > 0 ? n_trunc : default_truncation(lt);
  if (N > 300)
    throw scale_guard_error("series order " + std::to_string(N) +
                            " exceeds the desk-scale cap of 300");

  // v[n]: index of the first payout that ruins once n block jumps have
  // landed, i.e. the smallest k with k*w > u + n*(b-w)
  std::vector<long long> v(N + 1);
  for (int n = 0; n <= N; ++n) {
    const double lift = p.u + static_cast<double>(n) * (p.b - p.w);
    v[n] = static_cast<long long>(std::floor(lift / p.w)) + 1;
  }
  if (v[N] > 500)
    throw scale_guard_error("payout index " + std::to_string(v[N]) +
                            " at series order " + std::to_string(N) +
                            " exceeds the desk-scale cap of 500");

  auto log_erlang = [&](long long k) {
    return static_cast<double>(k) * std::log(p.mu_d) +
           static_cast<double>(k - 1) * std::log(time) - p.mu_d * time -
           std::lgamma(static_cast<double>(k));
  };
  auto log_poisson = [&](int n) {
    return -lt + (n > 0 ? n * std::log(lt) : 0.0) -
           std::lgamma(static_cast<double>(n) + 1.0);
  };

  RuinDensityEstimate est;
  est.t = time;
  est.truncation = N;
  est.mc_samples = mc_samples;
  est.density = std::exp(log_erlang(v[0]) + log_poisson(0));

  const auto binom = binomials(N);
  std::vector<double> g, pw, nodes, uni;
  double var = 0;
  for (int n = 1; n <= N; ++n) {
    const double coef = std::exp(log_erlang(v[n]) + log_poisson(n));
    if (coef == 0) continue;
    const long long before = v[n] - 1;  // payouts before the conditioning one
    Rng rng(seed, static_cast<uint64_t>(n));
    uni.resize(before);
    nodes.resize(n);
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    double s1 = 0, s2 = 0;
    for (long long rep = 0; rep < mc_samples; ++rep) {
      for (auto& x : uni) x = rng.uniform();
      std::sort(uni.begin(), uni.end());
      for (int k = 0; k < n; ++k)
        nodes[k] = v[k] <= before ? uni[v[k] - 1] : 1.0;
      if (!column(n, 0.0, nodes, binom, 1e12, g, pw))
        throw instability_error("polynomial magnitude above 1e12 at order " +
                                std::to_string(n));
      const double val = sign * g[n];
      s1 += val;
      s2 += val * val;
    }
    const double m1 = s1 / static_cast<double>(mc_samples);
    est.density += coef * m1;
    if (mc_samples > 1) {
      const double sample_var =
          std::max(0.0, s2 - static_cast<double>(mc_samples) * m1 * m1) /
          static_cast<double>(mc_samples - 1);
      var += coef * coef * sample_var / static_cast<double>(mc_samples);
    }
  }
  est.se = std::sqrt(var);
  return est;
}

}  // namespace poolrisk
