#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poolrisk/model.hpp"

namespace poolrisk {

// Parsed scenario file. The payout law reward_W applies to the smoothed
// model (mean near w); up jumps follow reward_scale * reward_W.
struct Scenario {
  NetworkParams network;
  PoolParams pool;
  bool has_miner = false;
  MinerParams miner;
  CombExp reward_W;
  double reward_scale = 0;
  std::vector<std::string> warnings;
  uint64_t hash = 0;  // fnv1a64 of the scenario text
};

uint64_t fnv1a64(const std::string& bytes);

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

}  // namespace poolrisk
