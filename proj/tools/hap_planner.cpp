// Command-line front end for the H-AP deployment planner: scenario
// validation, mobility analysis, random-walk simulation, deployment solving
// and parameter sweeps, with CSV/JSON report emission.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hapdeploy/hapdeploy.hpp"

namespace hd = hapdeploy;

namespace {

// Exit codes: 0 ok, 2 validation, 3 I/O, 4 infeasible, 5 size cap,
// 6 scheme/solver mismatch.
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitTooLarge = 5;
constexpr int kExitMismatch = 6;

struct CommonOpts {
  std::string scenario_path;
  std::string out_path;
  std::string format = "csv";
  int threads = 0;
  std::uint64_t seed = 1;
  double horizon = 1e6;
};

struct DeployOpts {
  std::string scheme = "I";
  std::string solver = "exhaustive";
  double alpha = -1.0;  // <0: use the scenario value
  int budget = -1;      // <0: use the scenario value
};

struct SweepOpts {
  std::string spec;  // PARAM:START:END:STEPS
  bool solver_given = false;
};

// Writes through either stdout or --out; opening failures are I/O errors.
class OutputStream {
public:
  explicit OutputStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw hd::ParseError("cannot open output file: " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }
  bool to_file() const { return file_.is_open(); }

private:
  std::ofstream file_;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

hd::Scenario load(const CommonOpts& opts) {
  return hd::load_scenario(opts.scenario_path);
}

void apply_overrides(hd::GridScenario& grid, const DeployOpts& d) {
  if (d.alpha >= 0) grid.alpha = d.alpha;
  if (d.budget >= 0) grid.budget = d.budget;
}

// Unweighted per-user averages of the analytic and (optionally) empirical
// distributions.
std::vector<hd::StationaryRow> stationary_rows(const hd::GridScenario& grid,
                                               const std::vector<hd::UserProfile>& users,
                                               bool with_sim, double horizon,
                                               std::uint64_t seed, int threads) {
  const int n = grid.site_count();
  const int m = static_cast<int>(users.size());
  const auto analyses = hd::analyze_all(users, grid);

  std::vector<double> phi(n, 0.0), pi(n, 0.0);
  for (const auto& a : analyses) {
    for (int ord = 0; ord < n; ++ord) {
      phi[ord] += a.stationary[ord] / m;
      pi[ord] += a.sojourn_dist[ord] / m;
    }
  }

  std::vector<double> phi_emp(n, 0.0), pi_emp(n, 0.0);
  if (with_sim) {
    std::vector<hd::EmpiricalDistributions> emp(users.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      try {
        while (true) {
          const std::size_t u = cursor.fetch_add(1);
          if (u >= users.size()) return;
          const auto trace = hd::simulate(
              users[u], grid, horizon,
              hd::derive_seed(seed, static_cast<std::uint64_t>(users[u].id)));
          emp[u] = hd::empirical_distributions(trace);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    const int workers = std::max(1, std::min<int>(threads, m));
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (const auto& e : emp) {
      for (int ord = 0; ord < n; ++ord) {
        phi_emp[ord] += e.visit_freq[ord] / m;
        pi_emp[ord] += e.occupancy[ord] / m;
      }
    }
  }

  std::vector<hd::StationaryRow> rows;
  rows.reserve(n);
  for (int ord = 0; ord < n; ++ord) {
    const hd::Site s = hd::site_at(ord, grid);
    hd::StationaryRow row;
    row.site_i = s.i;
    row.site_j = s.j;
    row.phi = phi[ord];
    row.pi_s = pi[ord];
    if (with_sim) {
      row.phi_empirical = phi_emp[ord];
      row.pi_empirical = pi_emp[ord];
      row.abs_err = std::max(std::abs(phi[ord] - phi_emp[ord]),
                             std::abs(pi[ord] - pi_emp[ord]));
    }
    rows.push_back(row);
  }
  return rows;
}

int run_validate(const CommonOpts& opts) {
  const auto [grid, users] = load(opts);
  std::cout << "scenario OK: " << grid.x_i << "x" << grid.x_j << " grid, N="
            << grid.site_count() << " sites, M=" << users.size()
            << " users\n"
            << "  street_length=" << grid.street_length
            << " wit_range=" << grid.wit_range << " wet_range=" << grid.wet_range
            << "\n  budget K=" << grid.budget << " alpha=" << grid.alpha
            << " battery Q=" << grid.battery_capacity
            << " horizon T=" << grid.observation_time << "\n"
            << "  path loss: ref_distance=" << grid.path_loss.ref_distance
            << " ref_loss=" << grid.path_loss.ref_loss
            << " exponent=" << grid.path_loss.exponent << "\n"
            << "  all invariants satisfied\n";
  return 0;
}

int run_stationary(const CommonOpts& opts, bool with_sim) {
  const auto [grid, users] = load(opts);
  const int threads = hd::effective_threads(opts.threads);
  const auto rows = stationary_rows(grid, users, with_sim, opts.horizon,
                                    opts.seed, threads);
  OutputStream out(opts.out_path);
  if (opts.format == "json") {
    hd::write_json(out.get(), rows, with_sim);
  } else {
    hd::write_csv(out.get(), rows, with_sim);
  }
  return 0;
}

void print_plan_grid(std::ostream& os, const hd::GridScenario& grid,
                     const hd::DeploymentPlan& plan) {
  os << "plan (K=" << plan.deployed_count() << "):\n";
  for (int i = 1; i <= grid.x_i; ++i) {
    os << " ";
    for (int j = 1; j <= grid.x_j; ++j) {
      os << ' ' << (plan.y[hd::site_ord(hd::Site{i, j}, grid)] ? 'X' : '.');
    }
    os << '\n';
  }
}

int run_deploy(const CommonOpts& opts, const DeployOpts& dopts) {
  auto [grid, users] = load(opts);
  apply_overrides(grid, dopts);
  hd::validate_grid(grid);
  const int threads = hd::effective_threads(opts.threads);
  const auto start = std::chrono::steady_clock::now();
  const hd::DeploymentInstance inst = hd::build_instance(grid, users);

  hd::PlanRecord record;
  record.scheme = dopts.scheme;
  record.solver = dopts.scheme == "S" ? "baseline" : dopts.solver;
  record.k = grid.budget;
  record.alpha = grid.alpha;

  hd::SolveStats stats;
  std::optional<hd::EvaluatedPlan> evaluated;
  std::vector<double> fractional;

  if (dopts.scheme == "S") {
    evaluated = hd::solve_s_baseline(inst, grid.budget);
    record.objective = evaluated->eta;
  } else {
    hd::DeploymentProblem problem;
    problem.scheme = dopts.scheme == "I"   ? hd::Scheme::I
                     : dopts.scheme == "E" ? hd::Scheme::E
                                           : hd::Scheme::B;
    problem.budget = grid.budget;
    problem.alpha = grid.alpha;
    problem.instance = &inst;
    if (problem.scheme == hd::Scheme::B) {
      hd::resolve_epsilon_max(problem, threads);
    }
    if (dopts.solver == "exhaustive") {
      evaluated = hd::solve_exhaustive(problem, threads, &stats);
    } else if (dopts.solver == "greedy") {
      evaluated = hd::solve_greedy(problem, &stats);
    } else if (dopts.solver == "bnb") {
      evaluated = hd::solve_bnb_dive(problem, threads, &stats);
    } else {  // lp: report the relaxed solution as deployment probabilities
      const hd::LpSolution sol = hd::solve_relaxation(problem);
      if (sol.status != hd::LpStatus::Optimal) {
        throw hd::Infeasible("LP relaxation is " +
                             std::string(sol.status == hd::LpStatus::Unbounded
                                             ? "unbounded"
                                             : "infeasible"));
      }
      fractional.assign(sol.x.begin(), sol.x.begin() + grid.site_count());
      const auto fe = hd::evaluate_fractional(inst, fractional);
      record.objective = sol.objective_value;
      record.eta = fe.eta;
      record.epsilon = fe.epsilon;
      record.lp_solves = 1;
      record.plan = hd::plan_string(fractional);
    }
    if (evaluated) {
      record.objective =
          problem.scheme == hd::Scheme::E ? evaluated->epsilon : evaluated->eta;
    }
  }

  if (evaluated) {
    record.eta = evaluated->eta;
    record.epsilon = evaluated->epsilon;
    record.plan = hd::plan_string(evaluated->plan);
  }
  record.iterations = stats.iterations;
  record.lp_solves = std::max(record.lp_solves, stats.lp_solves);
  record.wall_time_ms = elapsed_ms(start);

  OutputStream out(opts.out_path);
  const std::vector<hd::PlanRecord> records{record};
  if (opts.format == "json") {
    hd::write_json(out.get(), records);
  } else {
    hd::write_csv(out.get(), records);
  }
  // Human-readable plan grid goes wherever the record does not.
  std::ostream& side = out.to_file() ? std::cout : std::cerr;
  if (evaluated) {
    print_plan_grid(side, grid, evaluated->plan);
    side << "objective=" << hd::format_number(record.objective)
         << " eta=" << hd::format_number(record.eta)
         << " epsilon=" << hd::format_number(record.epsilon) << '\n';
    if (dopts.scheme == "B") {
      side << "budget satisfied; energy constraint satisfied\n";
    } else {
      side << "budget satisfied\n";
    }
  } else {
    side << "deployment probabilities (LP relaxation):\n";
    for (int i = 1; i <= grid.x_i; ++i) {
      side << " ";
      for (int j = 1; j <= grid.x_j; ++j) {
        side << ' '
             << hd::format_number(fractional[hd::site_ord(hd::Site{i, j}, grid)]);
      }
      side << '\n';
    }
  }
  return 0;
}

struct SweepPoint {
  std::string param;
  double value = 0.0;
};

// PARAM:START:END:STEPS with PARAM in {K, alpha, rC@i,j, rD, rE}.
struct ParsedSweep {
  std::string param;
  hd::Site site{0, 0};  // rC sweeps only
  double start = 0.0;
  double end = 0.0;
  int steps = 0;
};

ParsedSweep parse_sweep(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) {
    throw hd::ValidationError("sweep spec must be PARAM:START:END:STEPS, got '" +
                              spec + "'");
  }
  ParsedSweep out;
  out.param = parts[0];
  try {
    out.start = std::stod(parts[1]);
    out.end = std::stod(parts[2]);
    out.steps = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw hd::ValidationError("sweep spec has non-numeric fields: '" + spec + "'");
  }
  if (out.steps < 1) throw hd::ValidationError("sweep needs at least one step");
  if (out.end < out.start) throw hd::ValidationError("sweep end must be >= start");
  if (out.param.rfind("rC@", 0) == 0) {
    const std::string coords = out.param.substr(3);
    const auto comma = coords.find(',');
    if (comma == std::string::npos) {
      throw hd::ValidationError("crowded-range sweep must name a site: rC@i,j");
    }
    try {
      out.site.i = std::stoi(coords.substr(0, comma));
      out.site.j = std::stoi(coords.substr(comma + 1));
    } catch (const std::exception&) {
      throw hd::ValidationError("bad site in sweep param '" + out.param + "'");
    }
    out.param = "rC";
  } else if (out.param != "K" && out.param != "alpha" && out.param != "rD" &&
             out.param != "rE") {
    throw hd::ValidationError("unknown sweep parameter '" + out.param +
                              "' (expected K, alpha, rC@i,j, rD or rE)");
  }
  return out;
}

int run_sweep(const CommonOpts& opts, const DeployOpts& dopts,
              const SweepOpts& sopts) {
  auto [base_grid, users] = load(opts);
  apply_overrides(base_grid, dopts);
  hd::validate_grid(base_grid);
  const int threads = hd::effective_threads(opts.threads);
  if (dopts.solver != "exhaustive" && dopts.solver != "bnb") {
    throw hd::SchemeMismatch("sweep supports --solver exhaustive or bnb");
  }
  const bool force_bnb = dopts.solver == "bnb";
  // An explicit exhaustive request is honoured even past the candidate cap
  // (and then fails with the size-cap exit code); the default picks
  // exhaustive only when it fits.
  const bool force_exhaustive = sopts.solver_given && !force_bnb;

  const ParsedSweep sweep = parse_sweep(sopts.spec);
  // Domain checks on the swept parameter; point-level validation below
  // catches anything subtler.
  const double half = base_grid.street_length / 2.0;
  if (sweep.param == "rC" && !(sweep.end < half)) {
    throw hd::ValidationError("r^C sweep must stay below l/2 = " +
                              std::to_string(half));
  }
  if (sweep.param == "alpha" && !(sweep.start >= 0 && sweep.end <= 1)) {
    throw hd::ValidationError("alpha sweep must stay within [0,1]");
  }
  if (sweep.param == "K" &&
      !(sweep.start >= 0 && sweep.end <= base_grid.site_count())) {
    throw hd::ValidationError("K sweep must stay within 0..N");
  }
  int swept_ord = -1;
  if (sweep.param == "rC") swept_ord = hd::site_ord(sweep.site, base_grid);

  std::vector<hd::SweepRow> rows;
  std::optional<hd::DeploymentInstance> cached_instance;
  for (int step = 0; step < sweep.steps; ++step) {
    const double value =
        sweep.steps == 1
            ? sweep.start
            : sweep.start + (sweep.end - sweep.start) * step / (sweep.steps - 1);

    hd::GridScenario grid = base_grid;
    if (sweep.param == "K") {
      const double rounded = std::round(value);
      if (std::abs(value - rounded) > 1e-9) {
        throw hd::ValidationError("K sweep produced a non-integer budget");
      }
      grid.budget = static_cast<int>(rounded);
    } else if (sweep.param == "alpha") {
      grid.alpha = value;
    } else if (sweep.param == "rC") {
      grid.crowded_range[swept_ord] = value;
    } else if (sweep.param == "rD") {
      grid.wit_range = value;
    } else {
      grid.wet_range = value;
    }
    hd::validate_grid(grid);

    const bool instance_reusable = sweep.param == "K" || sweep.param == "alpha";
    if (!instance_reusable || !cached_instance) {
      cached_instance = hd::build_instance(grid, users);
    }
    const hd::DeploymentInstance& inst = *cached_instance;

    const double combos =
        hd::detail::combination_count(grid.site_count(), grid.budget);
    const bool exhaustive_ok =
        force_exhaustive ||
        (!force_bnb && combos <= static_cast<double>(2000000));

    auto solve_scheme = [&](hd::Scheme scheme, std::optional<double> emax) {
      hd::DeploymentProblem problem;
      problem.scheme = scheme;
      problem.budget = grid.budget;
      problem.alpha = grid.alpha;
      problem.epsilon_max = emax;
      problem.instance = &inst;
      return exhaustive_ok ? hd::solve_exhaustive(problem, threads)
                           : hd::solve_bnb_dive(problem, threads);
    };

    hd::SweepRow row;
    row.param = sweep.param == "rC"
                    ? "rC@" + std::to_string(sweep.site.i) + "," +
                          std::to_string(sweep.site.j)
                    : sweep.param;
    row.value = value;
    const auto plan_i = solve_scheme(hd::Scheme::I, std::nullopt);
    const auto plan_e = solve_scheme(hd::Scheme::E, std::nullopt);
    // The E optimum for this point is by definition the B constraint's
    // energy ceiling; reusing it keeps the sweep solver-consistent.
    const auto plan_b = solve_scheme(hd::Scheme::B, plan_e.epsilon);
    const auto plan_s = hd::solve_s_baseline(inst, grid.budget);
    row.eta_I = plan_i.eta;
    row.epsilon_I = plan_i.epsilon;
    row.eta_E = plan_e.eta;
    row.epsilon_E = plan_e.epsilon;
    row.eta_B = plan_b.eta;
    row.epsilon_B = plan_b.epsilon;
    row.eta_S = plan_s.eta;
    row.epsilon_S = plan_s.epsilon;
    if (sweep.param == "rC") {
      double tau_d = 0.0, tau_e = 0.0;
      for (const auto& a : inst.analyses) {
        tau_d += a.total_wit[swept_ord];
        tau_e += a.total_wet[swept_ord];
      }
      row.tau_d_site = tau_d;
      row.tau_e_site = tau_e;
    }
    rows.push_back(std::move(row));
  }

  OutputStream out(opts.out_path);
  if (opts.format == "json") {
    hd::write_json(out.get(), rows);
  } else {
    hd::write_csv(out.get(), rows);
  }
  return 0;
}

void add_common(CLI::App* sub, CommonOpts& opts, bool with_horizon) {
  sub->add_option("--scenario", opts.scenario_path, "Scenario JSON file")
      ->required();
  sub->add_option("--out", opts.out_path, "Output file (default: stdout)");
  sub->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", opts.threads,
                  "Worker threads (0 = HAP_PLANNER_THREADS or all cores)");
  sub->add_option("--seed", opts.seed, "Master RNG seed");
  if (with_horizon) {
    sub->add_option("--horizon", opts.horizon, "Simulated seconds per user");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planner for hybrid information/energy access-point deployment "
               "on grid city streets"};
  app.require_subcommand(1);

  CommonOpts copts;
  DeployOpts dopts;
  SweepOpts sopts;
  bool with_sim = false;

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", copts.scenario_path, "Scenario JSON file")
      ->required();

  CLI::App* stationary = app.add_subcommand(
      "stationary", "Analytic stationary/occupancy distributions per site");
  add_common(stationary, copts, true);
  stationary->add_flag("--simulate", with_sim,
                       "Also run the random-walk simulation and report errors");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Random-walk simulation summary vs analytic distributions");
  add_common(simulate, copts, true);

  CLI::App* deploy = app.add_subcommand("deploy", "Solve a deployment problem");
  add_common(deploy, copts, false);
  deploy->add_option("--scheme", dopts.scheme, "Deployment scheme")
      ->check(CLI::IsMember({"I", "E", "B", "S"}));
  deploy->add_option("--solver", dopts.solver, "Solver")
      ->check(CLI::IsMember({"exhaustive", "greedy", "lp", "bnb"}));
  deploy->add_option("--alpha", dopts.alpha, "Override the scenario alpha");
  deploy->add_option("--budget", dopts.budget, "Override the scenario budget K");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Solve all schemes over a parameter range");
  add_common(sweep, copts, false);
  sweep->add_option("--sweep", sopts.spec, "PARAM:START:END:STEPS")->required();
  sweep->add_option("--solver", dopts.solver, "Solver for every point")
      ->check(CLI::IsMember({"exhaustive", "greedy", "lp", "bnb"}));
  sweep->add_option("--alpha", dopts.alpha, "Override the scenario alpha");
  sweep->add_option("--budget", dopts.budget, "Override the scenario budget K");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return run_validate(copts);
    if (*stationary) return run_stationary(copts, with_sim);
    if (*simulate) return run_stationary(copts, true);
    if (*deploy) return run_deploy(copts, dopts);
    if (*sweep) {
      sopts.solver_given = sweep->count("--solver") > 0;
      return run_sweep(copts, dopts, sopts);
    }
  } catch (const hd::SchemeMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const hd::TooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTooLarge;
  } catch (const hd::Infeasible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const hd::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const hd::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const hd::NotErgodic& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const hd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
