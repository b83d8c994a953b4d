#include "doctest.h"
#include "poolrisk/scenario.hpp"

#include <string>

using namespace poolrisk;

namespace {

const char* kMinimal = R"({
  "network": {"mu": 60.0, "q": 0.1},
  "pool": {"p_I": 0.1, "f": 0.02, "b": 1000, "u": 22594, "t": 336.0}
})";

std::string with(const std::string& base, const std::string& needle,
                 const std::string& repl) {
  std::string s = base;
  s.replace(s.find(needle), needle.size(), repl);
  return s;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal scenario derives the pool") {
  Scenario sc = parse_scenario(kMinimal);
  CHECK(sc.network.lambda == doctest::Approx(6.0));
  CHECK(sc.pool.w == 98);
  CHECK(sc.pool.u == 22594.0);
  CHECK_FALSE(sc.has_miner);
  // default payout law: exponential at the rounded mean, up jumps b/w wider
  CHECK(sc.reward_W.n() == 1);
  CHECK(sc.reward_W.rates[0] == doctest::Approx(1.0 / 98.0));
  CHECK(sc.reward_scale == doctest::Approx(1000.0 / 98.0));
  CHECK(sc.warnings.empty());
}

TEST_CASE("network given by block rate alone") {
  Scenario sc = parse_scenario(R"({
    "network": {"lambda": 6.0, "q": 0.1},
    "pool": {"p_I": 0.1, "f": 0.02, "b": 1000, "u": 0, "t": 336.0}
  })");
  CHECK(sc.network.mu == doctest::Approx(60.0));
}

TEST_CASE("inconsistent network rates are rejected") {
  CHECK_THROWS_AS(parse_scenario(R"({
    "network": {"lambda": 5.0, "mu": 60.0, "q": 0.1},
    "pool": {"p_I": 0.1, "f": 0.02, "b": 1000, "u": 0, "t": 336.0}
  })"),
                  invalid_params);
}

TEST_CASE("structural validation") {
  CHECK_THROWS_AS(parse_scenario("not json"), invalid_params);
  CHECK_THROWS_AS(parse_scenario(R"({"network": {"mu": 60, "q": 0.1}})"), invalid_params);
  CHECK_THROWS_AS(parse_scenario(with(kMinimal, "\"b\": 1000", "\"b\": 1000.5")),
                  invalid_params);
  CHECK_THROWS_AS(parse_scenario(with(kMinimal, "\"f\": 0.02", "\"f\": 1.0")),
                  invalid_params);
  CHECK_THROWS_AS(parse_scenario(with(kMinimal, "\"q\": 0.1", "\"q\": 1.5")),
                  invalid_params);
}

TEST_CASE("rounding and drift warnings") {
  // (1-0.015)*1000*0.1 = 98.5 rounds away from the exact payout
  Scenario sc = parse_scenario(with(kMinimal, "\"f\": 0.02", "\"f\": 0.015"));
  REQUIRE(sc.warnings.size() == 1);
  CHECK(sc.warnings[0].find("rounded") != std::string::npos);

  // zero fee and a payout rounded up: income 597 < payout 600
  Scenario be = parse_scenario(
      with(with(kMinimal, "\"f\": 0.02", "\"f\": 0.0"), "\"b\": 1000", "\"b\": 995"));
  bool drift = false;
  for (const auto& w : be.warnings) drift = drift || w.find("drift") != std::string::npos;
  CHECK(drift);
}

TEST_CASE("explicit payout law") {
  Scenario sc = parse_scenario(R"({
    "network": {"mu": 60.0, "q": 0.1},
    "pool": {"p_I": 0.1, "f": 0.02, "b": 1000, "u": 0, "t": 336.0},
    "rewards": {"type": "comb_exp", "weights": [2.0, -1.0], "rates": [0.01, 0.02]}
  })");
  CHECK(sc.reward_W.n() == 2);
  // mean = 2/0.01 - 1/0.02 = 150, scale defaults to b/mean
  CHECK(sc.reward_scale == doctest::Approx(1000.0 / 150.0));

  CHECK_THROWS_AS(parse_scenario(R"({
    "network": {"mu": 60.0, "q": 0.1},
    "pool": {"p_I": 0.1, "f": 0.02, "b": 1000, "u": 0, "t": 336.0},
    "rewards": {"type": "comb_exp", "weights": [1.0], "rates": [0.01], "scale": 0.5}
  })"),
                  invalid_params);
  CHECK_THROWS_AS(parse_scenario(R"({
    "network": {"mu": 60.0, "q": 0.1},
    "pool": {"p_I": 0.1, "f": 0.02, "b": 1000, "u": 0, "t": 336.0},
    "rewards": {"type": "uniform"}
  })"),
                  invalid_params);
}

TEST_CASE("miner section with an electricity block") {
  Scenario sc = load_scenario(std::string(SCENARIO_DIR) + "/reference.json");
  REQUIRE(sc.has_miner);
  CHECK(sc.miner.p_i == 0.001);
  CHECK(sc.miner.c == doctest::Approx(3.4109771166274543).epsilon(1e-12));
  CHECK(sc.miner.t == 336.0);
  CHECK(sc.miner.mu == doctest::Approx(60.0));
  CHECK(sc.miner.lambda == doctest::Approx(6.0));
  CHECK(sc.pool.u == 22594.0);
}

TEST_CASE("miner cost specification is exclusive") {
  const std::string base = R"({
    "network": {"mu": 60.0, "q": 0.1},
    "pool": {"p_I": 0.1, "f": 0.02, "b": 1000, "u": 0, "t": 336.0},
    "miner": {"p_i": 0.001, "u": 1000, MINERCOST}
  })";
  CHECK_NOTHROW(parse_scenario(with(base, "MINERCOST", R"("c_i": 3.4)")));
  CHECK_THROWS_AS(parse_scenario(with(base, "MINERCOST", R"("p_x": 1)")), invalid_params);
  CHECK_THROWS_AS(
      parse_scenario(with(
          base, "MINERCOST",
          R"("c_i": 3.4, "electricity": {"annual_kwh": 1e9, "usd_per_kwh": 0.06, "usd_per_unit": 231.85})")),
      invalid_params);
  CHECK_THROWS_AS(parse_scenario(with(base, "\"p_i\": 0.001", "\"p_i\": 1.5")),
                  invalid_params);
}

TEST_CASE("income warnings for an unprofitable miner") {
  Scenario sc = parse_scenario(R"({
    "network": {"mu": 60.0, "q": 0.1},
    "pool": {"p_I": 0.1, "f": 0.02, "b": 1000, "u": 0, "t": 336.0},
    "miner": {"p_i": 0.001, "u": 1000, "c_i": 50.0}
  })");
  REQUIRE(sc.warnings.size() == 2);
  CHECK(sc.warnings[0].find("pooled") != std::string::npos);
  CHECK(sc.warnings[1].find("solo") != std::string::npos);
}

TEST_CASE("scenario hash tracks the raw text") {
  CHECK(parse_scenario(kMinimal).hash == parse_scenario(kMinimal).hash);
  CHECK(parse_scenario(kMinimal).hash !=
        parse_scenario(with(kMinimal, "22594", "22595")).hash);
  // reference vector for the 64-bit FNV-1a of the empty string
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

}  // TEST_SUITE
