#include "poolrisk/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "poolrisk/agp.hpp"
#include "poolrisk/mc.hpp"
#include "poolrisk/miner.hpp"
#include "poolrisk/model.hpp"
#include "poolrisk/pool_det.hpp"
#include "poolrisk/pool_stoch.hpp"
#include "poolrisk/rng.hpp"
#include "poolrisk/rootfind.hpp"

namespace poolrisk {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

PoolParams reference_pool(double u = 0) {
  return derive_pool_params(network_from_shares(60.0, 0.1), 0.1, 0.02, 1000, u,
                            336.0);
}

MinerParams reference_miner() {
  MinerParams m;
  m.p_i = 0.001;
  m.mu = 60.0;
  m.lambda = 6.0;
  m.u = 0;
  m.t = 336.0;
  m.c = electricity_cost_per_hour(0.001, 115.541e9, 0.06, 231.85);
  return m;
}

// ---- criterion 1: the capital where the two-week ruin probability of the
// reference pool drops below 5%

CriterionResult crit_threshold(uint64_t, double) {
  CriterionResult r{1, "ruin-capital threshold", false, 0, 30.0, ""};
  const auto sol = solve_ruin_det(reference_pool());
  const long long th = smallest_u_below(sol, 0.05);
  r.pass = std::llabs(th - 22594) <= 2;
  r.detail = fmt("ruin prob drops below 0.05 from u=%lld (psi=%.6f, "
                 "psi(u-1)=%.6f), target 22594 +/- 2",
                 th, sol.at(th), sol.at(th - 1));
  return r;
}

// ---- criterion 2: pooled-vs-solo surplus curves cross near 1255

CriterionResult crit_break_even(uint64_t, double) {
  CriterionResult r{2, "miner break-even", false, 0, 1.0, ""};
  const MinerParams m = reference_miner();
  const auto pooled = miner_det_pooled(m, 98.0);
  const auto solo = miner_det_solo(m, 1000.0);
  const double ustar = break_even_capital(pooled, solo);
  r.pass = std::abs(ustar - 1255.0) / 1255.0 <= 0.05;
  r.detail = fmt("curves cross at u=%.2f, target 1255 +/- 5%%", ustar);
  return r;
}

// ---- criterion 3: general smoothed-reward solver vs the
// single-exponential closed forms, plus the long-horizon limit

CriterionResult crit_closed_forms(uint64_t, double ts) {
  CriterionResult r{3, "closed-form identities", false, 0, 1.0, ""};
  const double lambda = 0.6, mu_d = 5.4, t = 336.0;
  const double alpha = 1.0 / 98, beta = 1.0 / 1000;
  const CombExp W = exponential_law(alpha);
  const CombExp B = exponential_law(beta);
  const auto V = solve_value_stoch(lambda, mu_d, t, W, B);
  const auto P = solve_ruin_stoch(lambda, mu_d, t, W, B);
  double worst = 0;
  for (double u : {0.0, 100.0, 1000.0, 10000.0}) {
    worst = std::max(
        worst, std::abs(V.at(u) - value_exp1(u, lambda, mu_d, t, alpha, beta)));
    worst = std::max(
        worst, std::abs(P.at(u) - ruin_exp1(u, lambda, mu_d, t, alpha, beta)));
  }
  const double psi0 = psi_infinite_exp(0, lambda, mu_d, alpha, beta);
  const double tol = 1e-10 * ts;
  r.pass = worst <= tol && std::abs(psi0 - 0.98820) <= 1e-5;
  r.detail = fmt("worst |general - closed form| = %.3g (tol %.3g), "
                 "no-horizon ruin prob at 0 = %.6f (target 0.98820 +/- 1e-5)",
                 worst, tol, psi0);
  return r;
}

// ---- criterion 4: analytic values sit inside the simulator's 95% bands

CriterionResult crit_simulation(uint64_t seed, double) {
  CriterionResult r{4, "simulation agreement", false, 0, 300.0, ""};
  constexpr long long kPaths = 1'000'000;
  int checked = 0, misses = 0;
  std::string miss_list;

  auto judge = [&](const char* family, double u, bool is_ruin, double analytic,
                   const SimEstimate& est) {
    ++checked;
    if (!est.contains95(analytic)) {
      ++misses;
      miss_list += fmt(" [%s %s u=%g analytic=%.6g mc=%.6g+/-%.2g]", family,
                       is_ruin ? "ruin" : "value", u, analytic, est.mean,
                       est.se);
    }
  };
  auto opts = [&](int family, int i) {
    SimOptions o;
    o.n_paths = kPaths;
    o.seed = seed + 1000003ull * static_cast<uint64_t>(family * 8 + i);
    return o;
  };

  {
    const PoolParams base = reference_pool();
    const RootSet roots =
        char_poly_roots(base.lambda, base.mu_d, base.t, base.b, base.w);
    const auto V = solve_value_det(base, roots);
    const auto P = solve_ruin_det(base, roots);
    const long long grid[5] = {0, 5000, 10000, 22594, 40000};
    const bool ruin_at[5] = {true, false, true, true, false};
    for (int i = 0; i < 5; ++i) {
      PoolParams p = base;
      p.u = static_cast<double>(grid[i]);
      const SimResult s = simulate_pool_det(p, opts(0, i));
      judge("pool-fixed", p.u, ruin_at[i],
            ruin_at[i] ? P.at(grid[i]) : V.at(grid[i]),
            ruin_at[i] ? s.ruin : s.value);
    }
  }
  {
    const PoolParams base = reference_pool();
    const CombExp W = exponential_law(1.0 / 98);
    const CombExp B = exponential_law(1.0 / 1000);
    const auto V = solve_value_stoch(base.lambda, base.mu_d, base.t, W, B);
    const auto P = solve_ruin_stoch(base.lambda, base.mu_d, base.t, W, B);
    const double grid[5] = {0, 5000, 10000, 20000, 30000};
    const bool ruin_at[5] = {true, false, true, false, true};
    for (int i = 0; i < 5; ++i) {
      PoolParams p = base;
      p.u = grid[i];
      const SimResult s = simulate_pool_stoch(p, W, B, opts(1, i));
      judge("pool-smooth", p.u, ruin_at[i],
            ruin_at[i] ? P.at(grid[i]) : V.at(grid[i]),
            ruin_at[i] ? s.ruin : s.value);
    }
  }
  const double miner_grid[5] = {50, 200, 500, 1000, 2000};
  const bool miner_ruin_at[5] = {true, true, true, false, false};
  {
    const MinerParams m = reference_miner();
    const auto det = miner_det_pooled(m, 98.0);
    for (int i = 0; i < 5; ++i) {
      const double u = miner_grid[i];
      const SimResult s = simulate_miner_det(det.rate, det.jump, det.c, u,
                                             det.t, opts(2, i));
      judge("miner-fixed", u, miner_ruin_at[i],
            miner_ruin_at[i] ? det.ruin(u) : det.value(u),
            miner_ruin_at[i] ? s.ruin : s.value);
    }
  }
  {
    const MinerParams m = reference_miner();
    const CombExp W = exponential_law(1.0 / 98);
    const auto st = miner_stoch_pooled(m, W);
    for (int i = 0; i < 5; ++i) {
      const double u = miner_grid[i];
      const SimResult s =
          simulate_miner_stoch(st.rate, W, st.c, u, st.t, opts(3, i));
      judge("miner-smooth", u, miner_ruin_at[i],
            miner_ruin_at[i] ? st.ruin(u) : st.value(u),
            miner_ruin_at[i] ? s.ruin : s.value);
    }
  }

  r.pass = misses <= 1;
  r.detail = fmt("%d of %d checks inside the 95%% band (allowed misses: 1)%s",
                 checked - misses, checked, miss_list.c_str());
  return r;
}

// ---- criterion 5: defining-equation residuals

CombExp random_comb_exp(int n, Rng& rng) {
  if (n == 1) return exponential_law(0.05 + 3.0 * rng.uniform());
  std::vector<double> rates(n);
  while (true) {
    for (auto& a : rates) a = 0.1 + 2.9 * rng.uniform();
    std::sort(rates.begin(), rates.end());
    bool ok = true;
    for (int i = 1; i < n; ++i) ok &= rates[i] - rates[i - 1] >= 0.08;
    if (ok) break;
  }
  std::vector<double> weights(n);
  if (rng.uniform() < 0.5) {
    double sum = 0;
    for (auto& w : weights) {
      w = 0.1 + rng.uniform();
      sum += w;
    }
    for (auto& w : weights) w /= sum;
  } else {
    // sum of n independent exponentials: always a valid signed combination
    for (int i = 0; i < n; ++i) {
      double w = 1;
      for (int j = 0; j < n; ++j)
        if (j != i) w *= rates[j] / (rates[j] - rates[i]);
      weights[i] = w;
    }
  }
  return make_comb_exp(weights, rates);
}

CriterionResult crit_residuals(uint64_t seed, double ts) {
  CriterionResult r{5, "equation residuals", false, 0, 60.0, ""};
  const PoolParams pool = reference_pool();
  const RootSet roots =
      char_poly_roots(pool.lambda, pool.mu_d, pool.t, pool.b, pool.w);
  const auto rv = recursion_residual(solve_value_det(pool, roots), 0, 3000);
  const auto rp = recursion_residual(solve_ruin_det(pool, roots), 0, 3000);

  Rng rng(seed, 777);
  double worst_ie = 0;
  for (int draw = 0; draw < 10; ++draw) {
    const int n = draw % 3 + 1;
    const CombExp W = random_comb_exp(n, rng);
    const CombExp B = scale_comb_exp(W, 1.5 + 8.0 * rng.uniform());
    const double lambda = 0.2 + 2.0 * rng.uniform();
    const double mu_d = 0.2 + 2.0 * rng.uniform();
    const double t = 5.0 + 45.0 * rng.uniform();
    const double m = mean(W);
    const std::vector<double> us = {0, m, 3 * m, 10 * m, 30 * m};
    worst_ie = std::max(
        worst_ie,
        integral_equation_residual(solve_value_stoch(lambda, mu_d, t, W, B), us)
            .max_rel);
    worst_ie = std::max(
        worst_ie,
        integral_equation_residual(solve_ruin_stoch(lambda, mu_d, t, W, B), us)
            .max_rel);
  }
  const double tol = 1e-6 * ts;
  r.pass = rv.max_rel < tol && rp.max_rel < tol && worst_ie < tol;
  r.detail = fmt("lattice recursion residual %.3g (value) / %.3g (ruin), "
                 "integral-equation residual %.3g over 10 draws (tol %.3g)",
                 rv.max_rel, rp.max_rel, worst_ie, tol);
  return r;
}

// ---- criterion 6: explicit coefficient formula vs direct linear solve

CriterionResult crit_cauchy(uint64_t seed, double ts) {
  CriterionResult r{6, "coefficient solver equivalence", false, 0, 5.0, ""};
  Rng rng(seed, 778);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = i % 4 + 1;
    std::vector<double> alphas(n);
    std::vector<cd> nodes, rhs;
    while (true) {
      for (auto& a : alphas) a = 0.2 + 4.8 * rng.uniform();
      std::sort(alphas.begin(), alphas.end());
      nodes.clear();
      for (int k = 0; k < n; ++k)
        nodes.emplace_back(0.05 + 2.95 * rng.uniform(),
                           -2.0 + 4.0 * rng.uniform());
      double sep = 1e300;
      for (int a = 0; a < n; ++a) {
        for (int b2 = a + 1; b2 < n; ++b2) {
          sep = std::min(sep, std::abs(alphas[a] - alphas[b2]));
          sep = std::min(sep, std::abs(nodes[a] - nodes[b2]));
        }
        for (int b2 = 0; b2 < n; ++b2)
          sep = std::min(sep, std::abs(alphas[a] - nodes[b2]));
      }
      if (sep >= 0.05) break;
    }
    rhs.clear();
    for (int k = 0; k < n; ++k) rhs.emplace_back(-2.0 + 4.0 * rng.uniform(), 0);
    const auto closed = cauchy_closed_form(alphas, nodes, rhs);
    const auto direct = cauchy_direct(alphas, nodes, rhs);
    double scale = 0;
    for (const cd& c : closed) scale = std::max(scale, std::abs(c));
    for (int k = 0; k < n; ++k)
      worst = std::max(worst, std::abs(closed[k] - direct[k]) /
                                  std::max(1e-30, scale));
  }
  const double tol = 1e-8 * ts;
  r.pass = worst <= tol;
  r.detail =
      fmt("worst relative disagreement %.3g over 50 instances (tol %.3g)",
          worst, tol);
  return r;
}

// ---- criterion 7: polynomial identities and the ruin-time density

CriterionResult crit_agp(uint64_t seed, double ts) {
  CriterionResult r{7, "polynomial suite", false, 0, 120.0, ""};
  Rng rng(seed, 779);
  auto sorted_nodes = [&](int n) {
    std::vector<double> u(n);
    for (auto& x : u) x = rng.uniform();
    std::sort(u.begin(), u.end());
    return u;
  };

  double worst_boundary = 0;
  for (int n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto u = sorted_nodes(n);
      worst_boundary = std::max(worst_boundary, std::abs(agp_eval(n, u[0], u)));
    }
  }

  double worst_transform = 0;
  for (int n = 1; n <= 8; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto u = sorted_nodes(n);
      const double a = -2.0 + 4.0 * rng.uniform();
      const double b = 0.5 + 2.5 * rng.uniform();
      const double y = -1.0 + 3.0 * rng.uniform();
      std::vector<double> shifted(u.size());
      for (size_t k = 0; k < u.size(); ++k) shifted[k] = a + b * u[k];
      const double lhs = agp_eval(n, a + b * y, shifted);
      const double rhs = std::pow(b, n) * agp_eval(n, y, u);
      worst_transform = std::max(
          worst_transform, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }

  bool order_ok = true;
  double worst_order_gap = 0;
  constexpr long long kReps = 200000;
  std::vector<double> draw;
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto u = sorted_nodes(n);
      const double exact = (n % 2 ? -1.0 : 1.0) * agp_eval(n, 0.0, u);
      long long hits = 0;
      draw.resize(n);
      for (long long k = 0; k < kReps; ++k) {
        for (auto& x : draw) x = rng.uniform();
        std::sort(draw.begin(), draw.end());
        bool below = true;
        for (int j = 0; j < n; ++j) below &= draw[j] <= u[j];
        hits += below ? 1 : 0;
      }
      const double freq = static_cast<double>(hits) / kReps;
      const double se =
          std::sqrt(std::max(freq * (1 - freq), 1.0 / kReps) / kReps);
      const double gap = std::abs(exact - freq);
      worst_order_gap = std::max(worst_order_gap, gap / se);
      order_ok &= gap <= 4.0 * se;
    }
  }

  // desk-scale instance: integral of the ruin-time density against a
  // fixed-horizon simulated ruin frequency
  PoolParams small;
  small.lambda = 1.0;
  small.mu_d = 2.0;
  small.mu = 3.0;
  small.b = 3;
  small.w = 1;
  small.w_exact = 1;
  small.u = 1;
  small.t = 2.0;
  const double T = 2.0;
  const int kPanels = 80;  // Simpson, 81 points
  const double h = T / kPanels;
  double integral = 0, var_int = 0;
  for (int i = 0; i <= kPanels; ++i) {
    const double coef = (i == 0 || i == kPanels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double f = 0, se = 0;
    if (i > 0) {
      const auto est =
          ruin_time_density(small, i * h, 0, 20000, seed + 31ull * i);
      f = est.density;
      se = est.se;
    }
    integral += coef * f;
    var_int += coef * coef * se * se;
  }
  integral *= h / 3.0;
  const double se_int = std::sqrt(var_int) * h / 3.0;

  SimOptions so;
  so.n_paths = 1'000'000;
  so.seed = seed + 999331ull;
  so.horizon = Horizon::Fixed;
  const SimResult sim = simulate_pool_det(small, so);
  const double gap = std::abs(integral - sim.ruin.mean);
  const double band = 3.0 * std::sqrt(se_int * se_int +
                                      sim.ruin.se * sim.ruin.se);

  const double tol = 1e-9 * ts;
  r.pass = worst_boundary <= tol && worst_transform <= tol && order_ok &&
           gap <= band;
  r.detail = fmt("boundary %.3g, transform %.3g (tol %.3g); order-stats "
                 "worst %.2f sigma (cap 4); density integral %.5f vs "
                 "simulated %.5f, gap %.3g (band %.3g)",
                 worst_boundary, worst_transform, tol, worst_order_gap,
                 integral, sim.ruin.mean, gap, band);
  return r;
}

// ---- criterion 8: ruin probability never increases in u, f, or q

CriterionResult crit_monotone(uint64_t, double ts) {
  CriterionResult r{8, "monotonicity", false, 0, 60.0, ""};
  const double tol = 1e-9 * ts;
  const NetworkParams net = network_from_shares(60.0, 0.1);

  double worst_u = -1e300;
  {
    const auto P = solve_ruin_det(reference_pool());
    double prev = P.at(0);
    for (long long u = 500; u <= 40000; u += 500) {
      const double cur = P.at(u);
      worst_u = std::max(worst_u, cur - prev);
      prev = cur;
    }
  }

  double worst_f = -1e300;
  {
    double prev = 0;
    for (int i = 0; i <= 19; ++i) {
      const double f = 0.01 * i;
      const auto pool = derive_pool_params(net, 0.1, f, 1000, 22594, 336.0);
      const double cur = solve_ruin_det(pool).at(22594);
      if (i > 0) worst_f = std::max(worst_f, cur - prev);
      prev = cur;
    }
  }

  double worst_q = -1e300;
  {
    // Block rate held fixed while q moves the share rate. The grid steps by
    // 0.05 so that (1-f)*b*q stays integral: off-lattice q values round the
    // payout and the induced drift jitter genuinely breaks monotonicity.
    double prev = 0;
    for (int i = 1; i <= 10; ++i) {
      const double q = 0.05 * i;
      const auto pool = derive_pool_params(network_from_shares(6.0 / q, q),
                                           0.1, 0.02, 1000, 22594, 336.0);
      const double cur = solve_ruin_det(pool).at(22594);
      if (i > 1) worst_q = std::max(worst_q, cur - prev);
      prev = cur;
    }
  }

  r.pass = worst_u <= tol && worst_f <= tol && worst_q <= tol;
  r.detail = fmt("largest increase along u: %.3g, along f: %.3g, along q: "
                 "%.3g (tol %.3g)",
                 worst_u, worst_f, worst_q, tol);
  return r;
}

}  // namespace

bool AcceptanceReport::all_pass() const {
  for (const auto& c : criteria)
    if (!c.pass) return false;
  return !criteria.empty();
}

CriterionResult run_criterion(int id, uint64_t seed, double tol_scale) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = crit_threshold(seed, tol_scale); break;
      case 2: r = crit_break_even(seed, tol_scale); break;
      case 3: r = crit_closed_forms(seed, tol_scale); break;
      case 4: r = crit_simulation(seed, tol_scale); break;
      case 5: r = crit_residuals(seed, tol_scale); break;
      case 6: r = crit_cauchy(seed, tol_scale); break;
      case 7: r = crit_agp(seed, tol_scale); break;
      case 8: r = crit_monotone(seed, tol_scale); break;
      default: throw invalid_params("criterion id must be 1..8");
    }
  } catch (const std::exception& e) {
    r.id = id;
    if (r.name.empty()) r.name = "criterion " + std::to_string(id);
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (r.elapsed_s >= r.budget_s) r.pass = false;
  return r;
}

AcceptanceReport run_acceptance(uint64_t seed, double tol_scale) {
  AcceptanceReport rep;
  for (int id = 1; id <= 8; ++id)
    rep.criteria.push_back(run_criterion(id, seed, tol_scale));
  return rep;
}

std::string format_criterion(const CriterionResult& r) {
  return fmt("criterion %d %-4s %-30s %6.1fs / %5.0fs  %s", r.id,
             r.pass ? "PASS" : "FAIL", r.name.c_str(), r.elapsed_s, r.budget_s,
             r.detail.c_str());
}

}  // namespace poolrisk
