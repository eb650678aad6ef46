#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "hapdeploy/scenario_io.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() {
  const char* env = std::getenv("HAP_PLANNER_BIN");
  REQUIRE(env != nullptr);
  return env;
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "hapdeploy_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "\"" + binary() + "\" " + args;
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Quote-aware CSV split (no escaped quotes in our outputs).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (char c : line) {
    if (c == '"') {
      in_quotes = !in_quotes;
    } else if (c == ',' && !in_quotes) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// First data row of a CSV report (skips `#` comments and the header).
std::vector<std::string> first_csv_row(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    return split_csv(line);
  }
  FAIL("no data row in " << p.string());
  return {};
}

std::vector<std::vector<std::string>> all_csv_rows(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(split_csv(line));
  }
  return rows;
}

int count_csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int rows = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

fs::path small_scenario() {
  static fs::path path = [] {
    const auto [grid, users] = fixtures::random_scenario(3, 3, 2, 3, 314);
    const fs::path p = work_dir() / "small.json";
    hapdeploy::save_scenario(p.string(), grid, users);
    return p;
  }();
  return path;
}

fs::path default_scenario() {
  const char* env = std::getenv("HAP_PLANNER_DATA");
  REQUIRE(env != nullptr);
  return fs::path(env) / "default_scenario.json";
}

}  // namespace

TEST_CASE("validate maps outcomes to exit codes") {
  CHECK(run("validate --scenario " + small_scenario().string()) == 0);

  SECTION("named invariant violations exit 2") {
    auto [grid, users] = fixtures::random_scenario(3, 3, 2, 3, 314);
    grid.wet_range = 60.0;  // r^E >= r^D
    const fs::path bad = work_dir() / "bad_ranges.json";
    std::ofstream(bad) << hapdeploy::scenario_to_json(grid, users).dump();
    CHECK(run("validate --scenario " + bad.string() + " 2>/dev/null") == 2);
  }
  SECTION("missing and malformed files exit 3") {
    CHECK(run("validate --scenario /no/such/file.json 2>/dev/null") == 3);
    const fs::path broken = work_dir() / "broken.json";
    std::ofstream(broken) << "{ nope";
    CHECK(run("validate --scenario " + broken.string() + " 2>/dev/null") == 3);
  }
}

TEST_CASE("deploy reports solver records") {
  const std::string scenario = small_scenario().string();
  const fs::path out_greedy = work_dir() / "greedy.csv";
  const fs::path out_exh = work_dir() / "exhaustive.csv";
  REQUIRE(run("deploy --scenario " + scenario + " --scheme I --solver greedy --out " +
              out_greedy.string() + " >/dev/null") == 0);
  REQUIRE(run("deploy --scenario " + scenario +
              " --scheme I --solver exhaustive --out " + out_exh.string() +
              " >/dev/null") == 0);
  const auto greedy = first_csv_row(out_greedy);
  const auto exhaustive = first_csv_row(out_exh);
  REQUIRE(greedy.size() >= 11);
  CHECK(greedy[0] == "I");
  CHECK(greedy[1] == "greedy");
  // eta column (5) agrees between the two solvers.
  CHECK(std::abs(std::stod(greedy[5]) - std::stod(exhaustive[5])) <= 1e-12);
  CHECK(greedy[10] == exhaustive[10]);  // identical plans

  SECTION("B at alpha zero degenerates to I") {
    const fs::path out_b = work_dir() / "b_zero.csv";
    REQUIRE(run("deploy --scenario " + scenario +
                " --scheme B --alpha 0 --solver exhaustive --out " +
                out_b.string() + " >/dev/null") == 0);
    CHECK(std::abs(std::stod(first_csv_row(out_b)[5]) -
                   std::stod(exhaustive[5])) <= 1e-9);
  }
  SECTION("LP relaxation of the I scheme is integral and matches") {
    const fs::path out_lp = work_dir() / "lp.csv";
    REQUIRE(run("deploy --scenario " + scenario +
                " --scheme I --solver lp --out " + out_lp.string() +
                " >/dev/null 2>/dev/null") == 0);
    const auto lp = first_csv_row(out_lp);
    CHECK(std::abs(std::stod(lp[4]) - std::stod(exhaustive[4])) <= 1e-9);
  }
  SECTION("scheme S runs without a solver") {
    const fs::path out_s = work_dir() / "s.csv";
    REQUIRE(run("deploy --scenario " + scenario + " --scheme S --out " +
                out_s.string() + " >/dev/null") == 0);
    CHECK(first_csv_row(out_s)[1] == "baseline");
  }
}

TEST_CASE("deploy error paths map to exit codes") {
  const std::string scenario = small_scenario().string();
  SECTION("greedy outside scheme I exits 6") {
    CHECK(run("deploy --scenario " + scenario +
              " --scheme E --solver greedy 2>/dev/null >/dev/null") == 6);
  }
  SECTION("exhaustive beyond the cap exits 5") {
    CHECK(run("deploy --scenario " + default_scenario().string() +
              " --scheme I --solver exhaustive --budget 12 "
              "2>/dev/null >/dev/null") == 5);
  }
}

TEST_CASE("stationary output is deterministic and schema-stable") {
  const std::string scenario = small_scenario().string();
  const fs::path a = work_dir() / "stat_a.csv";
  const fs::path b = work_dir() / "stat_b.csv";
  const std::string flags = " --simulate --horizon 2e5 --seed 7 --threads 2 ";
  REQUIRE(run("stationary --scenario " + scenario + flags + "--out " + a.string()) == 0);
  REQUIRE(run("stationary --scenario " + scenario + flags + "--out " + b.string()) == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(count_csv_rows(a) == 9);
  CHECK(read_file(a).find("# schema: stationary-sim-v1") != std::string::npos);

  SECTION("analytic-only schema without --simulate") {
    const fs::path c = work_dir() / "stat_c.csv";
    REQUIRE(run("stationary --scenario " + scenario + " --out " + c.string()) == 0);
    CHECK(read_file(c).find("# schema: stationary-v1") != std::string::npos);
  }
  SECTION("simulate subcommand always carries empirical columns") {
    const fs::path d = work_dir() / "sim.csv";
    REQUIRE(run("simulate --scenario " + scenario + " --horizon 2e5 --seed 3 --out " +
                d.string()) == 0);
    CHECK(read_file(d).find("# schema: stationary-sim-v1") != std::string::npos);
  }
}

TEST_CASE("json output mirrors the records") {
  const std::string scenario = small_scenario().string();
  const fs::path out = work_dir() / "deploy.json";
  REQUIRE(run("deploy --scenario " + scenario +
              " --scheme I --solver greedy --format json --out " + out.string() +
              " >/dev/null") == 0);
  const nlohmann::json doc = nlohmann::json::parse(read_file(out));
  CHECK(doc.at("schema") == "deploy-v1");
  CHECK(doc.at("rows").size() == 1);
  CHECK(doc.at("rows")[0].at("scheme") == "I");
  CHECK(doc.at("rows")[0].at("k").get<int>() == 3);
}

TEST_CASE("sweep emits one row per point and validates ranges") {
  const std::string scenario = small_scenario().string();
  const fs::path out = work_dir() / "sweep_k.csv";
  REQUIRE(run("sweep --scenario " + scenario + " --sweep K:1:4:4 --out " +
              out.string()) == 0);
  CHECK(count_csv_rows(out) == 4);
  CHECK(read_file(out).find("# schema: sweep-v1") != std::string::npos);
  // Budget growth can only help: every efficiency column is non-decreasing.
  const auto k_rows = all_csv_rows(out);
  for (std::size_t r = 0; r + 1 < k_rows.size(); ++r) {
    for (int col : {2, 3, 4, 5}) {  // eta_I, epsilon_I, eta_E, epsilon_E
      CHECK(std::stod(k_rows[r + 1][col]) >= std::stod(k_rows[r][col]) - 1e-12);
    }
  }

  SECTION("crowded-range sweep records circle times peaking at the WIT range") {
    const fs::path rc = work_dir() / "sweep_rc.csv";
    REQUIRE(run("sweep --scenario " + scenario +
                " --sweep rC@2,2:10:90:5 --out " + rc.string()) == 0);
    const auto rows = all_csv_rows(rc);
    REQUIRE(rows.size() == 5);  // r^C in {10,30,50,70,90}
    CHECK(rows[0][0] == "rC@2,2");
    std::size_t argmax = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (std::stod(rows[r][10]) > std::stod(rows[argmax][10])) argmax = r;
    }
    CHECK(std::stod(rows[argmax][1]) == 50.0);  // tau_d peaks at r^C = r^D
  }
  SECTION("alpha sweep trades information for energy monotonically") {
    const fs::path al = work_dir() / "sweep_alpha.csv";
    REQUIRE(run("sweep --scenario " + scenario + " --sweep alpha:0:1:6 --out " +
                al.string()) == 0);
    const auto rows = all_csv_rows(al);
    REQUIRE(rows.size() == 6);
    for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
      CHECK(std::stod(rows[r + 1][6]) <= std::stod(rows[r][6]) + 1e-9);  // eta_B
      CHECK(std::stod(rows[r + 1][7]) >= std::stod(rows[r][7]) - 1e-9);  // eps_B
    }
  }
  SECTION("out-of-domain sweeps exit 2") {
    CHECK(run("sweep --scenario " + scenario +
              " --sweep alpha:0:2:3 2>/dev/null >/dev/null") == 2);
    CHECK(run("sweep --scenario " + scenario +
              " --sweep rC@1,1:5:150:3 2>/dev/null >/dev/null") == 2);
    CHECK(run("sweep --scenario " + scenario +
              " --sweep bogus:0:1:2 2>/dev/null >/dev/null") == 2);
  }
  SECTION("greedy is not a sweep solver") {
    CHECK(run("sweep --scenario " + scenario +
              " --sweep K:1:2:2 --solver greedy 2>/dev/null >/dev/null") == 6);
  }
  SECTION("an explicit exhaustive request honours the candidate cap") {
    CHECK(run("sweep --scenario " + default_scenario().string() +
              " --sweep alpha:0:1:2 --budget 12 --solver exhaustive "
              "2>/dev/null >/dev/null") == 5);
  }
}

TEST_CASE("thread settings do not change results") {
  const std::string scenario = small_scenario().string();
  const fs::path one = work_dir() / "threads1.csv";
  const fs::path env = work_dir() / "threads_env.csv";
  REQUIRE(run("deploy --scenario " + scenario +
              " --scheme E --solver exhaustive --threads 1 --out " + one.string() +
              " >/dev/null") == 0);
  setenv("HAP_PLANNER_THREADS", "3", 1);
  const int rc = run("deploy --scenario " + scenario +
                     " --scheme E --solver exhaustive --out " + env.string() +
                     " >/dev/null");
  unsetenv("HAP_PLANNER_THREADS");
  REQUIRE(rc == 0);
  const auto a = first_csv_row(one);
  const auto b = first_csv_row(env);
  CHECK(a[4] == b[4]);   // objective
  CHECK(a[10] == b[10]);  // plan
}

TEST_CASE("analytic and simulated distributions agree on the shipped scenario") {
  const fs::path out = work_dir() / "default_stationary.csv";
  REQUIRE(run("stationary --scenario " + default_scenario().string() +
              " --simulate --horizon 4e6 --seed 1 --threads 4 --out " +
              out.string()) == 0);
  const auto rows = all_csv_rows(out);
  REQUIRE(rows.size() == 25);
  for (const auto& row : rows) {
    CHECK(std::stod(row[6]) <= 0.005);  // abs_err column
  }
}

TEST_CASE("branch-and-bound handles the shipped 5x5 scenario") {
  const fs::path out = work_dir() / "bnb_e.csv";
  const fs::path side = work_dir() / "bnb_e.txt";
  REQUIRE(run("deploy --scenario " + default_scenario().string() +
              " --scheme E --solver bnb --out " + out.string() + " > " +
              side.string()) == 0);
  const auto row = first_csv_row(out);
  CHECK(row[0] == "E");
  CHECK(row[1] == "bnb");
  int deployed = 0;
  for (char c : row[10]) deployed += c == '1';
  CHECK(deployed == 8);
  CHECK(read_file(side).find("budget satisfied") != std::string::npos);
}
