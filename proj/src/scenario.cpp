#include "poolrisk/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace poolrisk {

namespace {

using nlohmann::json;

double need_num(const json& j, const char* section, const char* key) {
  if (!j.contains(key))
    throw invalid_params(std::string(section) + "." + key + " is missing");
  const auto& v = j.at(key);
  if (!v.is_number())
    throw invalid_params(std::string(section) + "." + key +
                         " must be a number");
  return v.get<double>();
}

double opt_num(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw invalid_params(std::string("scenario is not valid JSON: ") +
                         e.what());
  }

  Scenario sc;
  sc.hash = fnv1a64(json_text);

  if (!j.contains("network") || !j.contains("pool"))
    throw invalid_params("scenario needs network and pool sections");
  const json& jn = j.at("network");
  const json& jp = j.at("pool");

  const double q = need_num(jn, "network", "q");
  if (jn.contains("mu")) {
    sc.network = network_from_shares(need_num(jn, "network", "mu"), q);
    if (jn.contains("lambda"))
      sc.network = network_checked(need_num(jn, "network", "lambda"),
                                   sc.network.mu, q);
  } else if (jn.contains("lambda")) {
    const double lambda = need_num(jn, "network", "lambda");
    sc.network = network_from_shares(lambda / q, q);
  } else {
    throw invalid_params("network needs mu or lambda");
  }

  const double b = need_num(jp, "pool", "b");
  if (b != std::floor(b) || b < 1)
    throw invalid_params("pool.b must be a positive integer");
  sc.pool = derive_pool_params(sc.network, need_num(jp, "pool", "p_I"),
                               need_num(jp, "pool", "f"),
                               static_cast<int>(b), need_num(jp, "pool", "u"),
                               need_num(jp, "pool", "t"));
  if (std::abs(sc.pool.w - sc.pool.w_exact) > 1e-9) {
    std::ostringstream os;
    os << "payout per share rounded from " << sc.pool.w_exact << " to "
       << sc.pool.w;
    sc.warnings.push_back(os.str());
  }
  if (!sc.pool.net_profit)
    sc.warnings.push_back(
        "pool drift is not positive: expected income <= expected payout");

  // payout law for the smoothed model; defaults to the exponential with
  // the rounded per-share mean
  double scale_default = static_cast<double>(sc.pool.b) / sc.pool.w;
  if (j.contains("rewards")) {
    const json& jr = j.at("rewards");
    const std::string type = jr.contains("type") ? jr.at("type").get<std::string>()
                                                 : std::string("exponential");
    if (type == "exponential") {
      sc.reward_W = exponential_law(1.0 / sc.pool.w);
    } else if (type == "comb_exp") {
      if (!jr.contains("weights") || !jr.contains("rates"))
        throw invalid_params("rewards.comb_exp needs weights and rates");
      sc.reward_W = make_comb_exp(jr.at("weights").get<std::vector<double>>(),
                                  jr.at("rates").get<std::vector<double>>());
      scale_default = static_cast<double>(sc.pool.b) / mean(sc.reward_W);
    } else {
      throw invalid_params("rewards.type must be exponential or comb_exp");
    }
    sc.reward_scale = opt_num(jr, "scale", scale_default);
  } else {
    sc.reward_W = exponential_law(1.0 / sc.pool.w);
    sc.reward_scale = scale_default;
  }
  if (!(sc.reward_scale > 1))
    throw invalid_params("reward scale must exceed 1");

  if (j.contains("miner")) {
    const json& jm = j.at("miner");
    sc.has_miner = true;
    sc.miner.p_i = need_num(jm, "miner", "p_i");
    if (!(sc.miner.p_i > 0 && sc.miner.p_i < 1))
      throw invalid_params("miner.p_i must lie in (0,1)");
    sc.miner.mu = sc.network.mu;
    sc.miner.lambda = sc.network.lambda;
    sc.miner.u = need_num(jm, "miner", "u");
    sc.miner.t = opt_num(jm, "t", sc.pool.t);
    if (jm.contains("c_i") && jm.contains("electricity"))
      throw invalid_params("miner takes c_i or an electricity block, not both");
    if (jm.contains("c_i")) {
      sc.miner.c = jm.at("c_i").get<double>();
    } else if (jm.contains("electricity")) {
      const json& je = jm.at("electricity");
      sc.miner.c = electricity_cost_per_hour(
          sc.miner.p_i, need_num(je, "miner.electricity", "annual_kwh"),
          need_num(je, "miner.electricity", "usd_per_kwh"),
          need_num(je, "miner.electricity", "usd_per_unit"));
    } else {
      throw invalid_params("miner needs c_i or an electricity block");
    }
    if (!(sc.miner.c > 0))
      throw invalid_params("miner cost rate must be positive");
    if (sc.miner.p_i * sc.miner.mu * sc.pool.w <= sc.miner.c)
      sc.warnings.push_back("pooled miner income does not cover costs");
    if (sc.miner.p_i * sc.miner.lambda * sc.pool.b <= sc.miner.c)
      sc.warnings.push_back("solo miner income does not cover costs");
  }

  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_params("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace poolrisk
