// poolrisk command line tool: solvency curves, parameter sweeps, ruin-time
// densities, and the built-in acceptance checks, emitted as CSV.

#include "CLI11.hpp"

#include "poolrisk/agp.hpp"
#include "poolrisk/mc.hpp"
#include "poolrisk/miner.hpp"
#include "poolrisk/model.hpp"
#include "poolrisk/pool_det.hpp"
#include "poolrisk/pool_stoch.hpp"
#include "poolrisk/scenario.hpp"
#include "poolrisk/verify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr const char* kVersion = "1.0.0";

// Display-only conversion constants.  The solver core works in reward units;
// nothing below the CLI knows about currencies.
constexpr const char* kUnitNote =
    "monetary unit: 1000 units = 6.25 BTC, 1 unit ~= 231.85 USD";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<double> parse_grid(const std::string& text, long long max_points) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  auto to_d = [&](const std::string& s) {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw CLI::ValidationError("--grid", "bad number '" + s + "'");
    return v;
  };
  if (parts.size() == 1) return {to_d(parts[0])};
  if (parts.size() != 3)
    throw CLI::ValidationError("--grid", "expected START:STOP:STEP or a single value");
  double a = to_d(parts[0]), b = to_d(parts[1]), step = to_d(parts[2]);
  if (step <= 0) throw CLI::ValidationError("--grid", "step must be positive");
  if (b < a) throw CLI::ValidationError("--grid", "stop must be >= start");
  long long n = static_cast<long long>(std::floor((b - a) / step + 1e-9)) + 1;
  if (n > max_points)
    throw CLI::ValidationError("--grid", "grid has " + std::to_string(n) +
                                             " points, limit is " + std::to_string(max_points) +
                                             " (raise --max-grid)");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

long long as_integer_u(double u, const char* what) {
  double r = std::round(u);
  if (std::abs(u - r) > 1e-9)
    throw poolrisk::invalid_params(std::string(what) +
                                   " requires whole-number capital u (got " + num(u) +
                                   "); use --variant stoch for fractional capital");
  return static_cast<long long>(r);
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
      os = &file;
    }
  }
  std::ostream& out() { return *os; }
};

void write_provenance(std::ostream& os, const poolrisk::Scenario& sc, uint64_t seed,
                      bool used_mc) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(sc.hash));
  os << "# scenario_hash " << hash << "\n";
  os << "# version " << kVersion << "\n";
  if (used_mc) os << "# seed " << seed << "\n";
  os << "# " << kUnitNote << "\n";
  for (const auto& w : sc.warnings) os << "# warning: " << w << "\n";
}

struct McCols {
  bool exp_horizon = false;
  bool fixed_horizon = false;
};

McCols parse_mc_horizon(const std::string& s) {
  McCols c;
  if (s == "exp") {
    c.exp_horizon = true;
  } else if (s == "fixed") {
    c.fixed_horizon = true;
  } else if (s == "both") {
    c.exp_horizon = c.fixed_horizon = true;
  } else {
    throw CLI::ValidationError("--mc-horizon", "expected exp, fixed, or both");
  }
  return c;
}

void append_mc(std::string& row, const poolrisk::SimResult& r) {
  row += "," + num(r.value.mean) + "," + num(r.value.se) + "," + num(r.ruin.mean) + "," +
         num(r.ruin.se);
}

// ---------------------------------------------------------------------------
// pool: value and ruin probability against initial capital
// ---------------------------------------------------------------------------

int cmd_pool(const std::string& scenario_path, const std::string& variant,
             const std::string& grid_text, long long mc_paths, const std::string& mc_horizon,
             uint64_t seed, const std::string& out_path, long long max_grid) {
  poolrisk::Scenario sc = poolrisk::load_scenario(scenario_path);
  std::vector<double> us =
      grid_text.empty() ? std::vector<double>{sc.pool.u} : parse_grid(grid_text, max_grid);
  McCols mc = parse_mc_horizon(mc_horizon);
  bool use_mc = mc_paths > 0;

  Output output(out_path);
  std::ostream& os = output.out();
  write_provenance(os, sc, seed, use_mc);

  std::string header = "u,v_hat,psi_hat";
  if (use_mc && mc.exp_horizon) header += ",mc_value,mc_value_se,mc_ruin,mc_ruin_se";
  if (use_mc && mc.fixed_horizon)
    header += ",mc_value_fixed,mc_value_fixed_se,mc_ruin_fixed,mc_ruin_fixed_se";

  if (variant == "det") {
    for (double u : us) as_integer_u(u, "the deterministic-rewards pool model");
    poolrisk::RootSet roots = poolrisk::char_poly_roots(sc.pool.lambda, sc.pool.mu_d, sc.pool.t,
                                                        sc.pool.b, sc.pool.w);
    poolrisk::DetPoolSolution value = poolrisk::solve_value_det(sc.pool, roots);
    poolrisk::DetPoolSolution ruin = poolrisk::solve_ruin_det(sc.pool, roots);
    try {
      long long th = poolrisk::smallest_u_below(ruin, 0.05);
      os << "# ruin_prob below 0.05 from u = " << th << "\n";
    } catch (const std::exception& e) {
      os << "# ruin_prob threshold not found: " << e.what() << "\n";
    }
    os << header << "\n";
    for (size_t i = 0; i < us.size(); ++i) {
      long long u = static_cast<long long>(std::llround(us[i]));
      std::string row = num(static_cast<double>(u)) + "," + num(value.at(u)) + "," + num(ruin.at(u));
      if (use_mc) {
        poolrisk::PoolParams p = sc.pool;
        p.u = static_cast<double>(u);
        poolrisk::SimOptions so;
        so.n_paths = mc_paths;
        so.seed = seed + i;
        if (mc.exp_horizon) {
          so.horizon = poolrisk::Horizon::ExponentialMean;
          append_mc(row, poolrisk::simulate_pool_det(p, so));
        }
        if (mc.fixed_horizon) {
          so.horizon = poolrisk::Horizon::Fixed;
          append_mc(row, poolrisk::simulate_pool_det(p, so));
        }
      }
      os << row << "\n";
    }
    return 0;
  }

  if (variant != "stoch")
    throw CLI::ValidationError("--variant", "expected det or stoch");

  poolrisk::CombExp W = sc.reward_W;
  poolrisk::CombExp B = poolrisk::scale_comb_exp(W, sc.reward_scale);
  poolrisk::StochPoolSolution value = poolrisk::solve_value_stoch(sc.pool, W, sc.reward_scale);
  poolrisk::StochPoolSolution ruin = poolrisk::solve_ruin_stoch(sc.pool, W, sc.reward_scale);
  os << header << "\n";
  for (size_t i = 0; i < us.size(); ++i) {
    double u = us[i];
    std::string row = num(u) + "," + num(value.at(u)) + "," + num(ruin.at(u));
    if (use_mc) {
      poolrisk::PoolParams p = sc.pool;
      p.u = u;
      poolrisk::SimOptions so;
      so.n_paths = mc_paths;
      so.seed = seed + i;
      if (mc.exp_horizon) {
        so.horizon = poolrisk::Horizon::ExponentialMean;
        append_mc(row, poolrisk::simulate_pool_stoch(p, W, B, so));
      }
      if (mc.fixed_horizon) {
        so.horizon = poolrisk::Horizon::Fixed;
        append_mc(row, poolrisk::simulate_pool_stoch(p, W, B, so));
      }
    }
    os << row << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep: ruin probability and value against a model parameter
// ---------------------------------------------------------------------------

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

// Applies axis settings on top of the scenario.  Network throughput stays
// fixed when q varies: the per-share reward scales with difficulty instead.
poolrisk::PoolParams pool_at(const poolrisk::Scenario& sc,
                             const std::vector<std::pair<std::string, double>>& setting,
                             double u_default) {
  poolrisk::NetworkParams net = sc.network;
  double p_I = sc.pool.p_I, f = sc.pool.f, u = u_default;
  for (const auto& [name, v] : setting) {
    if (name == "u")
      u = v;
    else if (name == "f")
      f = v;
    else if (name == "p_I")
      p_I = v;
    else if (name == "q")
      net = poolrisk::network_from_shares(net.lambda / v, v);
    else
      throw CLI::ValidationError("--axis", "expected one of u, f, q, p_I");
  }
  return poolrisk::derive_pool_params(net, p_I, f, sc.pool.b, u, sc.pool.t);
}

int cmd_sweep(const std::string& scenario_path, const std::string& variant,
              const std::string& axis, const std::string& grid_text, const std::string& axis2,
              const std::string& grid2_text, double u_override, const std::string& out_path,
              long long max_grid) {
  poolrisk::Scenario sc = poolrisk::load_scenario(scenario_path);
  if (variant != "det" && variant != "stoch")
    throw CLI::ValidationError("--variant", "expected det or stoch");
  bool stoch = variant == "stoch";
  bool w_varies = axis != "u" || (!axis2.empty() && axis2 != "u");
  if (stoch && w_varies && sc.reward_W.n() != 1)
    throw poolrisk::invalid_params(
        "stochastic sweeps over f, q, or p_I rebuild the reward law per point and "
        "support exponential rewards only");

  SweepAxis ax1{axis, parse_grid(grid_text, max_grid)};
  SweepAxis ax2;
  if (!axis2.empty()) {
    if (grid2_text.empty()) throw CLI::ValidationError("--grid2", "required with --axis2");
    if (axis2 == axis) throw CLI::ValidationError("--axis2", "must differ from --axis");
    ax2 = SweepAxis{axis2, parse_grid(grid2_text, max_grid)};
    if (static_cast<long long>(ax1.values.size() * ax2.values.size()) > max_grid)
      throw CLI::ValidationError("--grid2", "cross product exceeds --max-grid");
  }
  double u_eval = std::isnan(u_override) ? sc.pool.u : u_override;

  Output output(out_path);
  std::ostream& os = output.out();
  write_provenance(os, sc, 0, false);
  std::string header = ax1.name;
  if (!ax2.name.empty()) header += "," + ax2.name;
  header += ",u_eval,v_hat,psi_hat";
  os << header << "\n";

  auto emit = [&](double v1, bool two, double v2) {
    std::vector<std::pair<std::string, double>> setting;
    if (two) setting.emplace_back(ax2.name, v2);
    setting.emplace_back(ax1.name, v1);
    poolrisk::PoolParams p = pool_at(sc, setting, u_eval);
    double u = p.u;
    double vhat, psihat;
    if (stoch) {
      poolrisk::CombExp W =
          w_varies ? poolrisk::exponential_law(1.0 / p.w_exact) : sc.reward_W;
      double a = w_varies ? static_cast<double>(p.b) / p.w_exact : sc.reward_scale;
      vhat = poolrisk::solve_value_stoch(p, W, a).at(u);
      psihat = poolrisk::solve_ruin_stoch(p, W, a).at(u);
    } else {
      long long ui = as_integer_u(u, "the deterministic-rewards pool model");
      poolrisk::RootSet roots =
          poolrisk::char_poly_roots(p.lambda, p.mu_d, p.t, p.b, p.w);
      vhat = poolrisk::solve_value_det(p, roots).at(ui);
      psihat = poolrisk::solve_ruin_det(p, roots).at(ui);
    }
    std::string row = num(v1);
    if (two) row += "," + num(v2);
    row += "," + num(u) + "," + num(vhat) + "," + num(psihat);
    os << row << "\n";
  };

  if (ax2.name.empty()) {
    for (double v1 : ax1.values) emit(v1, false, 0.0);
  } else {
    for (double v2 : ax2.values)
      for (double v1 : ax1.values) emit(v1, true, v2);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// miner: pooled against solo mining for an individual participant
// ---------------------------------------------------------------------------

int cmd_miner(const std::string& scenario_path, const std::string& variant,
              const std::string& grid_text, long long mc_paths, uint64_t seed,
              const std::string& out_path, long long max_grid) {
  poolrisk::Scenario sc = poolrisk::load_scenario(scenario_path);
  if (!sc.has_miner)
    throw poolrisk::invalid_params("scenario has no miner section");
  std::vector<double> us =
      grid_text.empty() ? std::vector<double>{sc.miner.u} : parse_grid(grid_text, max_grid);
  bool use_mc = mc_paths > 0;

  Output output(out_path);
  std::ostream& os = output.out();
  write_provenance(os, sc, seed, use_mc);

  std::string header = "u,v_solo,v_pooled,psi_solo,psi_pooled";
  if (use_mc)
    header +=
        ",mc_v_solo,mc_v_solo_se,mc_psi_solo,mc_psi_solo_se"
        ",mc_v_pooled,mc_v_pooled_se,mc_psi_pooled,mc_psi_pooled_se";

  if (variant == "det") {
    poolrisk::MinerDetSolution pooled =
        poolrisk::miner_det_pooled(sc.miner, static_cast<double>(sc.pool.w));
    poolrisk::MinerDetSolution solo =
        poolrisk::miner_det_solo(sc.miner, static_cast<double>(sc.pool.b));
    try {
      double ustar = poolrisk::break_even_capital(pooled, solo);
      os << "# pooled and solo expected surplus cross at u = " << num(ustar) << "\n";
    } catch (const std::exception& e) {
      os << "# break-even capital not found: " << e.what() << "\n";
    }
    os << header << "\n";
    for (size_t i = 0; i < us.size(); ++i) {
      double u = us[i];
      std::string row = num(u) + "," + num(solo.value(u)) + "," + num(pooled.value(u)) + "," +
                        num(solo.ruin(u)) + "," + num(pooled.ruin(u));
      if (use_mc) {
        poolrisk::SimOptions so;
        so.n_paths = mc_paths;
        so.seed = seed + i;
        append_mc(row, poolrisk::simulate_miner_det(solo.rate, solo.jump, solo.c, u, solo.t, so));
        append_mc(row,
                  poolrisk::simulate_miner_det(pooled.rate, pooled.jump, pooled.c, u, pooled.t, so));
      }
      os << row << "\n";
    }
    return 0;
  }

  if (variant != "stoch")
    throw CLI::ValidationError("--variant", "expected det or stoch");

  poolrisk::CombExp W = sc.reward_W;
  poolrisk::CombExp B = poolrisk::scale_comb_exp(W, sc.reward_scale);
  poolrisk::MinerStochSolution pooled = poolrisk::miner_stoch_pooled(sc.miner, W);
  poolrisk::MinerStochSolution solo = poolrisk::miner_stoch_solo(sc.miner, B);
  try {
    double ustar = poolrisk::break_even_capital(pooled, solo);
    os << "# pooled and solo expected surplus cross at u = " << num(ustar) << "\n";
  } catch (const std::exception& e) {
    os << "# break-even capital not found: " << e.what() << "\n";
  }
  os << header << "\n";
  for (size_t i = 0; i < us.size(); ++i) {
    double u = us[i];
    std::string row = num(u) + "," + num(solo.value(u)) + "," + num(pooled.value(u)) + "," +
                      num(solo.ruin(u)) + "," + num(pooled.ruin(u));
    if (use_mc) {
      poolrisk::SimOptions so;
      so.n_paths = mc_paths;
      so.seed = seed + i;
      append_mc(row, poolrisk::simulate_miner_stoch(solo.rate, B, solo.c, u, solo.t, so));
      append_mc(row, poolrisk::simulate_miner_stoch(pooled.rate, W, pooled.c, u, pooled.t, so));
    }
    os << row << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// density: ruin-time density curve for the deterministic-rewards pool
// ---------------------------------------------------------------------------

int cmd_density(const std::string& scenario_path, const std::string& grid_text,
                long long truncation, long long samples, uint64_t seed,
                const std::string& out_path, long long max_grid) {
  poolrisk::Scenario sc = poolrisk::load_scenario(scenario_path);
  if (grid_text.empty()) throw CLI::ValidationError("--grid", "required for density");
  std::vector<double> ts = parse_grid(grid_text, max_grid);

  Output output(out_path);
  std::ostream& os = output.out();
  write_provenance(os, sc, seed, true);
  os << "t,density,se,truncation\n";
  for (size_t i = 0; i < ts.size(); ++i) {
    double t = ts[i];
    if (t <= 0) {
      os << num(t) << ",0,0,0\n";
      continue;
    }
    poolrisk::RuinDensityEstimate est = poolrisk::ruin_time_density(
        sc.pool, t, static_cast<int>(truncation), samples, seed + 31 * i);
    os << num(t) << "," << num(est.density) << "," << num(est.se) << "," << est.truncation
       << "\n";
  }
  return 0;
}

int cmd_verify(uint64_t seed, double tol_scale) {
  poolrisk::AcceptanceReport rep = poolrisk::run_acceptance(seed, tol_scale);
  for (const auto& c : rep.criteria) std::cout << poolrisk::format_criterion(c) << "\n";
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ruin probabilities and expected surplus for mining pools and miners"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer(
      "Typical study commands (scenarios/reference.json ships with the repo):\n"
      "  pool curves, deterministic rewards, capital 0..40000:\n"
      "    poolrisk pool --scenario scenarios/reference.json --variant det \\\n"
      "        --grid 0:40000:500 --out pool_det.csv\n"
      "  pool curves with random rewards and a Monte Carlo check:\n"
      "    poolrisk pool --scenario scenarios/reference.json --variant stoch \\\n"
      "        --grid 0:40000:500 --mc 100000 --mc-horizon both --out pool_stoch.csv\n"
      "  ruin probability against the fee:\n"
      "    poolrisk sweep --scenario scenarios/reference.json --axis f \\\n"
      "        --grid 0:0.19:0.01 --out fee_sweep.csv\n"
      "  ruin probability against the pool share with a fee cross:\n"
      "    poolrisk sweep --scenario scenarios/reference.json --axis p_I \\\n"
      "        --grid 0.05:0.5:0.05 --axis2 f --grid2 0:0.1:0.05 --out share_fee.csv\n"
      "  ruin probability against the network difficulty parameter:\n"
      "    poolrisk sweep --scenario scenarios/reference.json --axis q \\\n"
      "        --grid 0.05:0.5:0.05 --out q_sweep.csv\n"
      "  miner pooled-versus-solo curves with the break-even capital:\n"
      "    poolrisk miner --scenario scenarios/reference.json --variant det \\\n"
      "        --grid 0:3000:50 --out miner.csv\n"
      "  ruin-time density curve:\n"
      "    poolrisk density --scenario scenarios/density_small.json \\\n"
      "        --grid 0:2:0.025 --samples 20000 --out density.csv\n"
      "  built-in acceptance checks:\n"
      "    poolrisk verify");

  std::string scenario_path, variant = "det", grid_text, grid2_text, axis, axis2;
  std::string mc_horizon = "exp", out_path;
  long long mc_paths = 0, max_grid = 100000, trunc = 0, samples = 20000;
  uint64_t seed = 1;
  double u_override = std::nan(""), tol_scale = 1.0;

  auto add_common = [&](CLI::App* sub, bool with_mc) {
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--variant", variant, "reward model: det or stoch");
    sub->add_option("--grid", grid_text, "grid START:STOP:STEP or a single value");
    sub->add_option("--out", out_path, "output CSV path (default stdout)");
    sub->add_option("--max-grid", max_grid, "maximum number of grid points");
    if (with_mc) {
      sub->add_option("--mc", mc_paths, "Monte Carlo paths per grid point (0 = off)");
      sub->add_option("--seed", seed, "Monte Carlo seed");
    }
  };

  CLI::App* pool = app.add_subcommand("pool", "pool value and ruin probability against capital");
  add_common(pool, true);
  pool->add_option("--mc-horizon", mc_horizon, "horizon for Monte Carlo columns: exp, fixed, both");

  CLI::App* sweep = app.add_subcommand("sweep", "pool curves against a model parameter");
  add_common(sweep, false);
  sweep->add_option("--axis", axis, "sweep parameter: u, f, q, or p_I")->required();
  sweep->add_option("--axis2", axis2, "optional second parameter for a cross sweep");
  sweep->add_option("--grid2", grid2_text, "grid for --axis2");
  sweep->add_option("--u", u_override, "capital at which to evaluate (default scenario u)");

  CLI::App* miner = app.add_subcommand("miner", "miner pooled-versus-solo curves");
  add_common(miner, true);

  CLI::App* density = app.add_subcommand("density", "ruin-time density for the pool");
  density->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  density->add_option("--grid", grid_text, "time grid START:STOP:STEP")->required();
  density->add_option("--trunc", trunc, "series truncation order (0 = automatic)");
  density->add_option("--samples", samples, "Monte Carlo samples per series term");
  density->add_option("--seed", seed, "Monte Carlo seed");
  density->add_option("--out", out_path, "output CSV path (default stdout)");
  density->add_option("--max-grid", max_grid, "maximum number of grid points");

  CLI::App* verify = app.add_subcommand("verify", "run the built-in acceptance checks");
  verify->add_option("--seed", seed, "seed for the randomized checks");
  verify->add_option("--tol-scale", tol_scale,
                     "multiplier on deterministic tolerances (diagnostics only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pool->parsed())
      return cmd_pool(scenario_path, variant, grid_text, mc_paths, mc_horizon, seed, out_path,
                      max_grid);
    if (sweep->parsed())
      return cmd_sweep(scenario_path, variant, axis, grid_text, axis2, grid2_text, u_override,
                       out_path, max_grid);
    if (miner->parsed())
      return cmd_miner(scenario_path, variant, grid_text, mc_paths, seed, out_path, max_grid);
    if (density->parsed())
      return cmd_density(scenario_path, grid_text, trunc, samples, seed, out_path, max_grid);
    if (verify->parsed()) return cmd_verify(seed, tol_scale);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
