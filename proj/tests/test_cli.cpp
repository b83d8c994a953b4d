#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string base = "cli_test_" + std::to_string(counter++);
  const std::string out_path = base + ".out";
  const std::string err_path = base + ".err";
  const std::string cmd =
      std::string(CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  RunResult r;
  const int raw = std::system(cmd.c_str());
  r.status = (raw == -1) ? -1 : WEXITSTATUS(raw);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string scen(const char* name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

int count_data_rows(const std::string& csv) {
  int rows = 0;
  std::istringstream in(csv);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help lists the subcommands") {
  RunResult r = run_cli("--help");
  CHECK(r.status == 0);
  CHECK(r.out.find("pool") != std::string::npos);
  CHECK(r.out.find("sweep") != std::string::npos);
  CHECK(r.out.find("miner") != std::string::npos);
  CHECK(r.out.find("density") != std::string::npos);
  CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("pool curves with integer jumps") {
  const std::string args = "pool --scenario " + scen("density_small.json") +
                           " --variant det --grid 0:6:2";
  RunResult r = run_cli(args);
  CHECK(r.status == 0);
  CHECK(r.out.find("u,v_hat,psi_hat") != std::string::npos);
  CHECK(r.out.find("# scenario_hash ") != std::string::npos);
  CHECK(r.out.find("# ruin_prob below 0.05 from u = ") != std::string::npos);
  CHECK(count_data_rows(r.out) == 4);

  RunResult again = run_cli(args);
  CHECK(again.out == r.out);
}

TEST_CASE("fractional capital needs the smoothed variant") {
  RunResult r = run_cli("pool --scenario " + scen("density_small.json") +
                        " --variant det --grid 0.5");
  CHECK(r.status == 1);
  CHECK(r.err.find("stoch") != std::string::npos);

  RunResult ok = run_cli("pool --scenario " + scen("density_small.json") +
                         " --variant stoch --grid 0.5");
  CHECK(ok.status == 0);
  CHECK(count_data_rows(ok.out) == 1);
}

TEST_CASE("pool monte carlo columns for both horizons") {
  const std::string args = "pool --scenario " + scen("density_small.json") +
                           " --variant stoch --grid 0:4:4 --mc 5000 --mc-horizon both --seed 3";
  RunResult r = run_cli(args);
  CHECK(r.status == 0);
  CHECK(r.out.find("# seed 3") != std::string::npos);
  CHECK(r.out.find("mc_value,mc_value_se,mc_ruin,mc_ruin_se") != std::string::npos);
  CHECK(r.out.find("mc_value_fixed") != std::string::npos);
  CHECK(count_data_rows(r.out) == 2);
  RunResult again = run_cli(args);
  CHECK(again.out == r.out);
}

TEST_CASE("miner curves carry the break-even comment") {
  RunResult det = run_cli("miner --scenario " + scen("reference.json") +
                          " --variant det --grid 0:2000:1000");
  CHECK(det.status == 0);
  CHECK(det.out.find("u,v_solo,v_pooled,psi_solo,psi_pooled") != std::string::npos);
  CHECK(det.out.find("cross at u = ") != std::string::npos);
  CHECK(count_data_rows(det.out) == 3);

  RunResult st = run_cli("miner --scenario " + scen("reference.json") +
                         " --variant stoch --grid 0:2000:1000 --mc 2000");
  CHECK(st.status == 0);
  CHECK(st.out.find("mc_psi_pooled") != std::string::npos);
}

TEST_CASE("miner requires a miner section") {
  RunResult r = run_cli("miner --scenario " + scen("density_small.json") + " --variant det");
  CHECK(r.status == 1);
  CHECK(r.err.find("miner") != std::string::npos);
}

TEST_CASE("fee sweep emits one row per grid point") {
  RunResult r = run_cli("sweep --scenario " + scen("density_small.json") +
                        " --axis f --grid 0:0.1:0.05 --u 1");
  CHECK(r.status == 0);
  CHECK(r.out.find("f,u_eval,v_hat,psi_hat") != std::string::npos);
  CHECK(count_data_rows(r.out) == 3);
}

TEST_CASE("two-axis sweep crosses the grids") {
  RunResult r = run_cli("sweep --scenario " + scen("density_small.json") +
                        " --axis u --grid 1:3:1 --axis2 f --grid2 0:0.1:0.1");
  CHECK(r.status == 0);
  CHECK(r.out.find("u,f,u_eval,v_hat,psi_hat") != std::string::npos);
  CHECK(count_data_rows(r.out) == 6);
}

TEST_CASE("density curve emits the series order") {
  RunResult r = run_cli("density --scenario " + scen("density_small.json") +
                        " --grid 0.5:1:0.25 --samples 2000 --seed 11");
  CHECK(r.status == 0);
  CHECK(r.out.find("t,density,se,truncation") != std::string::npos);
  CHECK(count_data_rows(r.out) == 3);
  RunResult again = run_cli("density --scenario " + scen("density_small.json") +
                            " --grid 0.5:1:0.25 --samples 2000 --seed 11");
  CHECK(again.out == r.out);
}

TEST_CASE("missing scenario file fails cleanly") {
  RunResult r = run_cli("pool --scenario does_not_exist.json --variant det");
  CHECK(r.status == 1);
  CHECK(!r.err.empty());
}

TEST_CASE("bad grid syntax fails cleanly") {
  RunResult r = run_cli("pool --scenario " + scen("density_small.json") +
                        " --variant det --grid 5:1:1");
  CHECK(r.status != 0);
}

}  // TEST_SUITE
