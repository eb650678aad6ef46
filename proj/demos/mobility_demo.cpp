// Builds a small random scenario, analyses one user's mobility and compares
// the analytic distributions against a simulated walk.

#include <cstdio>

#include "hapdeploy/mobility.hpp"
#include "hapdeploy/random_walk.hpp"
#include "hapdeploy/scenario_io.hpp"

using namespace hapdeploy;

int main() {
  ScenarioGenConfig cfg;
  cfg.x_i = 3;
  cfg.x_j = 3;
  cfg.user_count = 1;
  cfg.budget = 2;
  cfg.seed = 7;
  const auto [grid, users] = generate_scenario(cfg);

  const MobilityAnalysis analysis = analyze(users[0], grid);
  const WalkTrace trace = simulate(users[0], grid, 5e6, 1234);
  const auto emp = empirical_distributions(trace);

  std::printf("site   phi      visit_freq   pi_s     occupancy  D^S[s]  D^D[s]  D^E[s]\n");
  for (int ord = 0; ord < grid.site_count(); ++ord) {
    const Site s = site_at(ord, grid);
    std::printf("(%d,%d)  %.5f  %.5f      %.5f  %.5f    %6.1f  %6.1f  %6.1f\n",
                s.i, s.j, analysis.stationary[ord], emp.visit_freq[ord],
                analysis.sojourn_dist[ord], emp.occupancy[ord],
                analysis.region_sojourn[ord], analysis.wit_sojourn[ord],
                analysis.wet_sojourn[ord]);
  }
  std::printf("\n%lld region transitions simulated\n",
              static_cast<long long>(trace.total_visits()));
  return 0;
}
