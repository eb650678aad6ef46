// Regenerates data/default_scenario.json: a 5x5 grid with 100 users, seeded
// so the shipped file is reproducible. Usage: make_default_scenario [path].

#include <fstream>
#include <iostream>
#include <string>

#include "hapdeploy/scenario_io.hpp"

int main(int argc, char** argv) {
  const std::string path =
      argc > 1 ? argv[1] : std::string("data/default_scenario.json");
  hapdeploy::ScenarioGenConfig cfg;  // defaults are the shipped settings
  cfg.seed = 20240605;
  const auto [grid, users] = hapdeploy::generate_scenario(cfg);
  nlohmann::json doc = hapdeploy::scenario_to_json(grid, users);
  doc["meta"] = {
      {"generator", "make_default_scenario"},
      {"seed", cfg.seed},
      {"note",
       "crowded ranges drawn uniformly from [5,60] m; per-user speeds from "
       "[1,2] m/s with crowd factors in [0.3,0.9]; turning probabilities are "
       "seeded random weights normalised per crossroad"}};
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << '\n';
    return 1;
  }
  out << doc.dump(1) << '\n';
  std::cout << "wrote " << path << " (" << grid.x_i << "x" << grid.x_j
            << " grid, " << users.size() << " users, seed " << cfg.seed
            << ")\n";
  return 0;
}
