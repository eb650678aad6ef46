#pragma once

// Small scenario builders shared across the test suites.

#include <cstdint>
#include <vector>

#include "hapdeploy/grid.hpp"
#include "hapdeploy/scenario_io.hpp"

namespace fixtures {

// Minimal valid grid with homogeneous crowded ranges; Table II geometry by
// default (l=200, r^D=50, r^E=10, T=10h).
inline hapdeploy::GridScenario make_grid(int x_i, int x_j, double crowded = 10.0) {
  hapdeploy::GridScenario g;
  g.x_i = x_i;
  g.x_j = x_j;
  g.street_length = 200.0;
  g.wit_range = 50.0;
  g.wet_range = 10.0;
  g.crowded_range.assign(static_cast<std::size_t>(x_i) * x_j, crowded);
  g.tx_power = 1.0;
  g.rectify_eff = 0.8;
  g.battery_capacity = 1.0;
  g.observation_time = 36000.0;
  g.alpha = 0.97;
  g.budget = 1;
  g.download_rate = 1e6;
  g.path_loss = hapdeploy::PathLossModel{1.0, 0.003, 3.0};
  return g;
}

// Uniform-turning user with homogeneous speeds.
inline hapdeploy::UserProfile make_user(const hapdeploy::GridScenario& grid,
                                        double base_speed = 2.0,
                                        double crowd_speed = 1.0, int id = 1) {
  hapdeploy::UserProfile u;
  u.id = id;
  u.base_speed = base_speed;
  u.crowd_speed.assign(static_cast<std::size_t>(grid.site_count()), crowd_speed);
  return u;
}

// Randomised small scenario via the library generator.
inline hapdeploy::Scenario random_scenario(int x_i, int x_j, int users, int budget,
                                           std::uint64_t seed,
                                           double alpha = 0.97) {
  hapdeploy::ScenarioGenConfig cfg;
  cfg.x_i = x_i;
  cfg.x_j = x_j;
  cfg.user_count = users;
  cfg.budget = budget;
  cfg.alpha = alpha;
  cfg.seed = seed;
  return hapdeploy::generate_scenario(cfg);
}

}  // namespace fixtures
