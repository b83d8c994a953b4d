#include "poolrisk/model.hpp"

#include <cmath>

namespace poolrisk {

NetworkParams network_from_shares(double mu, double q) {
  if (!(mu > 0)) throw invalid_params("network share rate must be positive");
  if (!(q > 0 && q < 1)) throw invalid_params("difficulty ratio q must lie in (0,1)");
  return NetworkParams{q * mu, mu, q};
}

NetworkParams network_checked(double lambda, double mu, double q, double tol) {
  NetworkParams net = network_from_shares(mu, q);
  if (std::abs(lambda - net.lambda) > tol * (1.0 + std::abs(net.lambda)))
    throw invalid_params("network rates inconsistent: lambda != q*mu");
  net.lambda = lambda;
  return net;
}

PoolParams derive_pool_params(const NetworkParams& net, double p_I, double f,
                              int b, double u, double t) {
  if (!(net.q > 0 && net.q < 1)) throw invalid_params("q must lie in (0,1)");
  if (!(f >= 0 && f < 1)) throw invalid_params("fee f must lie in [0,1)");
  if (!(p_I > 0 && p_I <= 1)) throw invalid_params("p_I must lie in (0,1]");
  if (!(b > 0)) throw invalid_params("block reward b must be positive");
  if (!(t > 0)) throw invalid_params("mean horizon t must be positive");

  PoolParams p;
  p.p_I = p_I;
  p.f = f;
  p.b = b;
  p.u = u;
  p.t = t;
  p.lambda = p_I * net.lambda;
  p.mu = p_I * net.mu;
  p.mu_d = p.mu - p.lambda;
  p.w_exact = (1.0 - f) * b * net.q;
  p.w = static_cast<int>(std::llround(p.w_exact));
  if (!(p.mu_d > 0)) throw invalid_params("compensated payout rate must be positive");
  if (!(p.b > p.w && p.w > 0)) throw invalid_params("need b > w > 0 after rounding");
  p.net_profit = p.lambda * p.b > p.mu * p.w;
  return p;
}

namespace {

void validate_comb_exp(const CombExp& law) {
  const size_t n = law.rates.size();
  if (n == 0 || law.weights.size() != n)
    throw invalid_params("weights and rates must be non-empty and equal length");
  double sum = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!(law.rates[i] > 0)) throw invalid_params("rates must be positive");
    if (i > 0 && !(law.rates[i] > law.rates[i - 1]))
      throw invalid_params("rates must be strictly increasing");
    if (law.weights[i] == 0) throw invalid_params("weights must be nonzero");
    sum += law.weights[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw invalid_params("weights must sum to 1");

  // tail is dominated by the slowest rate, so its weight must be positive
  if (!(law.weights[0] > 0)) throw invalid_params("density negative in the tail");

  // 10,000-point log-spaced grid from well inside the fastest scale out to
  // where the slowest term has decayed to ~1e-26
  const double x_lo = 1e-4 / law.rates[n - 1];
  const double x_hi = 60.0 / law.rates[0];
  const double ratio = std::log(x_hi / x_lo) / 9999.0;
  double raw0 = 0;
  for (size_t i = 0; i < n; ++i) raw0 += law.weights[i] * law.rates[i];
  if (raw0 < -1e-12) throw invalid_params("density negative at 0");
  for (int k = 0; k < 10000; ++k) {
    const double x = x_lo * std::exp(ratio * k);
    double v = 0;
    for (size_t i = 0; i < n; ++i)
      v += law.weights[i] * law.rates[i] * std::exp(-law.rates[i] * x);
    if (v < -1e-12) throw invalid_params("density negative on the check grid");
  }

  double m = 0;
  for (size_t i = 0; i < n; ++i) m += law.weights[i] / law.rates[i];
  if (!(m > 0) || !std::isfinite(m)) throw invalid_params("mean must be finite and positive");
}

}  // namespace

CombExp make_comb_exp(std::vector<double> weights, std::vector<double> rates) {
  CombExp law{std::move(weights), std::move(rates)};
  validate_comb_exp(law);
  return law;
}

CombExp exponential_law(double rate) { return make_comb_exp({1.0}, {rate}); }

CombExp scale_comb_exp(const CombExp& law, double a) {
  if (!(a > 1)) throw invalid_params("scale factor must exceed 1");
  CombExp out = law;
  for (double& r : out.rates) r /= a;
  return out;
}

double mean(const CombExp& law) {
  double m = 0;
  for (int i = 0; i < law.n(); ++i) m += law.weights[i] / law.rates[i];
  return m;
}

double pdf(const CombExp& law, double x) {
  if (x < 0) return 0;
  double v = 0;
  for (int i = 0; i < law.n(); ++i)
    v += law.weights[i] * law.rates[i] * std::exp(-law.rates[i] * x);
  if (v < 0 && v >= -1e-12) v = 0;  // clamp grid-checked noise in reporting
  return v;
}

double cdf(const CombExp& law, double x) { return 1.0 - tail(law, x); }

double tail(const CombExp& law, double x) {
  if (x <= 0) return 1.0;
  double v = 0;
  for (int i = 0; i < law.n(); ++i)
    v += law.weights[i] * std::exp(-law.rates[i] * x);
  return v;
}

double laplace(const CombExp& law, double s) {
  double v = 0;
  for (int i = 0; i < law.n(); ++i)
    v += law.weights[i] * law.rates[i] / (law.rates[i] + s);
  return v;
}

double electricity_cost_per_hour(double p_i, double annual_kwh,
                                 double usd_per_kwh, double usd_per_unit) {
  if (p_i < 0 || annual_kwh < 0 || usd_per_kwh < 0)
    throw invalid_params("electricity inputs must be nonnegative");
  if (!(usd_per_unit > 0)) throw invalid_params("unit conversion must be positive");
  const double hours_per_year = 8766.0;  // Julian year
  return p_i * (annual_kwh / hours_per_year) * usd_per_kwh / usd_per_unit;
}

}  // namespace poolrisk
