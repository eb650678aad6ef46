// Solves the I-, E- and B-deployment problems on a random 4x4 scenario with
// every solver and prints the resulting efficiencies side by side.

#include <cstdio>

#include "hapdeploy/deploy.hpp"
#include "hapdeploy/scenario_io.hpp"

using namespace hapdeploy;

namespace {

void show(const char* label, const EvaluatedPlan& ev) {
  std::printf("%-22s eta=%.6f  epsilon=%.4f J  plan=", label, ev.eta, ev.epsilon);
  for (auto y : ev.plan.y) std::printf("%c", y ? '1' : '0');
  std::printf("\n");
}

}  // namespace

int main() {
  ScenarioGenConfig cfg;
  cfg.x_i = 4;
  cfg.x_j = 4;
  cfg.user_count = 10;
  cfg.budget = 5;
  cfg.alpha = 0.9;
  cfg.seed = 21;
  const auto [grid, users] = generate_scenario(cfg);
  const DeploymentInstance inst = build_instance(grid, users);

  DeploymentProblem problem;
  problem.budget = grid.budget;
  problem.alpha = grid.alpha;
  problem.instance = &inst;

  problem.scheme = Scheme::I;
  show("I exhaustive", solve_exhaustive(problem));
  show("I greedy", solve_greedy(problem));
  show("I bnb dive", solve_bnb_dive(problem));

  problem.scheme = Scheme::E;
  show("E exhaustive", solve_exhaustive(problem));
  show("E bnb dive", solve_bnb_dive(problem));

  problem.scheme = Scheme::B;
  const double emax = resolve_epsilon_max(problem);
  std::printf("epsilon_max=%.4f J, alpha=%.2f -> floor %.4f J\n", emax,
              problem.alpha, problem.alpha * emax);
  show("B exhaustive", solve_exhaustive(problem));
  show("B bnb dive", solve_bnb_dive(problem));

  show("S baseline", solve_s_baseline(inst, grid.budget));
  return 0;
}
