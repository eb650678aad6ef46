#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hapdeploy/energy.hpp"
#include "hapdeploy/errors.hpp"
#include "hapdeploy/grid.hpp"
#include "hapdeploy/mobility.hpp"
#include "hapdeploy/simplex.hpp"

namespace hapdeploy {

enum class Scheme { I, E, B };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::I: return "I";
    case Scheme::E: return "E";
    case Scheme::B: return "B";
  }
  return "?";
}

// Precomputed per-instance data shared by every solver: per-user mobility
// analyses, per-pass energies, aggregated WIT coefficients and the linear
// energy coefficients (passes times per-pass energy) per user and site.
struct DeploymentInstance {
  GridScenario grid;
  std::vector<MobilityAnalysis> analyses;
  std::vector<std::vector<double>> pass_energy;        // [user][site], joules
  std::vector<std::vector<double>> energy_coeff_site;  // [site][user], joules
  std::vector<double> wit_coeff;                       // [site]

  int user_count() const { return static_cast<int>(analyses.size()); }
  int site_count() const { return grid.site_count(); }
  double battery() const { return grid.battery_capacity; }
};

inline DeploymentInstance build_instance(const GridScenario& grid,
                                         const std::vector<UserProfile>& users) {
  validate_scenario(grid, users);
  DeploymentInstance inst;
  inst.grid = grid;
  const int n = grid.site_count();
  const int m = static_cast<int>(users.size());
  inst.analyses = analyze_all(users, grid);
  inst.pass_energy.resize(users.size());
  for (int u = 0; u < m; ++u) {
    inst.pass_energy[u].resize(n);
    for (int ord = 0; ord < n; ++ord) {
      inst.pass_energy[u][ord] =
          energy_per_pass(users[u], grid, site_at(ord, grid));
    }
  }
  inst.wit_coeff = wit_coefficients(inst.analyses, m, grid.observation_time);
  inst.energy_coeff_site.assign(n, std::vector<double>(m, 0.0));
  for (int u = 0; u < m; ++u) {
    const MobilityAnalysis& a = inst.analyses[u];
    for (int ord = 0; ord < n; ++ord) {
      inst.energy_coeff_site[ord][u] =
          a.total_wet[ord] / a.wet_sojourn[ord] * inst.pass_energy[u][ord];
    }
  }
  return inst;
}

struct DeploymentProblem {
  Scheme scheme = Scheme::I;
  int budget = 0;
  double alpha = 0.0;                 // B only: required fraction of epsilon_max
  std::optional<double> epsilon_max;  // B only: resolved lazily when unset
  const DeploymentInstance* instance = nullptr;
  std::size_t exhaustive_cap = 2000000;
};

struct SolveStats {
  long candidates = 0;
  long iterations = 0;
  long lp_solves = 0;
};

// True (clamped) evaluation of a binary plan. Summation order is ascending
// site index per user, matching the solvers, so re-evaluating a solver's
// plan reproduces its objective bit for bit.
inline EvaluatedPlan evaluate_plan(const DeploymentInstance& inst,
                                   const DeploymentPlan& plan) {
  const int n = inst.site_count();
  const int m = inst.user_count();
  EvaluatedPlan out;
  out.plan = plan;
  double eta = 0.0;
  for (int ord = 0; ord < n; ++ord) {
    if (plan.y[ord]) eta += inst.wit_coeff[ord];
  }
  out.eta = eta;
  out.per_user_energy.assign(m, 0.0);
  for (int ord = 0; ord < n; ++ord) {
    if (!plan.y[ord]) continue;
    const std::vector<double>& col = inst.energy_coeff_site[ord];
    for (int u = 0; u < m; ++u) out.per_user_energy[u] += col[u];
  }
  out.epsilon = wet_efficiency(out.per_user_energy, inst.battery());
  return out;
}

// Evaluation of a fractional (relaxed) plan: the efficiency stays linear in
// y, the battery clamp still applies per user.
struct FractionalEvaluation {
  double eta = 0.0;
  double epsilon = 0.0;
};

inline FractionalEvaluation evaluate_fractional(const DeploymentInstance& inst,
                                                const std::vector<double>& y) {
  const int n = inst.site_count();
  const int m = inst.user_count();
  FractionalEvaluation out;
  for (int ord = 0; ord < n; ++ord) out.eta += inst.wit_coeff[ord] * y[ord];
  std::vector<double> per_user(m, 0.0);
  for (int ord = 0; ord < n; ++ord) {
    const std::vector<double>& col = inst.energy_coeff_site[ord];
    for (int u = 0; u < m; ++u) per_user[u] += col[u] * y[ord];
  }
  out.epsilon = wet_efficiency(per_user, inst.battery());
  return out;
}

namespace detail {

inline double combination_count(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > 1e18) return 1e18;
  }
  return c;
}

// Candidate evaluation shared by the exhaustive search paths. Keeps the
// first maximiser encountered, so enumeration order decides ties.
class ExhaustiveBest {
public:
  ExhaustiveBest(const DeploymentInstance& inst, Scheme scheme,
                 double energy_floor)
      : inst_(inst),
        scheme_(scheme),
        energy_floor_(energy_floor),
        acc_(static_cast<std::size_t>(inst.user_count()), 0.0) {}

  void consider(const std::vector<int>& combo) {
    double objective = 0.0;
    if (scheme_ != Scheme::E) {
      for (int ord : combo) objective += inst_.wit_coeff[ord];
    }
    if (scheme_ != Scheme::I) {
      std::fill(acc_.begin(), acc_.end(), 0.0);
      for (int ord : combo) {
        const std::vector<double>& col = inst_.energy_coeff_site[ord];
        for (std::size_t u = 0; u < acc_.size(); ++u) acc_[u] += col[u];
      }
      const double epsilon = wet_efficiency(acc_, inst_.battery());
      if (scheme_ == Scheme::E) {
        objective = epsilon;
      } else if (epsilon < energy_floor_) {
        return;  // violates the B-scheme energy constraint
      }
    }
    if (!found_ || objective > best_objective_) {
      found_ = true;
      best_objective_ = objective;
      best_combo_ = combo;
    }
  }

  bool found() const { return found_; }
  double objective() const { return best_objective_; }
  const std::vector<int>& combo() const { return best_combo_; }

private:
  const DeploymentInstance& inst_;
  Scheme scheme_;
  double energy_floor_;
  std::vector<double> acc_;
  bool found_ = false;
  double best_objective_ = 0.0;
  std::vector<int> best_combo_;
};

// Lexicographic combination odometer over {first..n-1} for the suffix of a
// fixed prefix; visits the full combination in ascending order.
template <typename Fn>
void for_each_suffix_combination(std::vector<int>& combo, int prefix_len, int n,
                                 Fn&& fn) {
  const int k = static_cast<int>(combo.size());
  const int tail = k - prefix_len;
  if (tail == 0) {
    fn(combo);
    return;
  }
  const int first = prefix_len == 0 ? 0 : combo[prefix_len - 1] + 1;
  if (n - first < tail) return;
  for (int t = 0; t < tail; ++t) combo[prefix_len + t] = first + t;
  while (true) {
    fn(combo);
    int i = k - 1;
    while (i >= prefix_len && combo[i] == n - k + i) --i;
    if (i < prefix_len) return;
    ++combo[i];
    for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
}

inline DeploymentPlan plan_from_combo(int n, const std::vector<int>& combo) {
  DeploymentPlan plan;
  plan.y.assign(static_cast<std::size_t>(n), 0);
  for (int ord : combo) plan.y[static_cast<std::size_t>(ord)] = 1;
  return plan;
}

}  // namespace detail

inline void require_instance(const DeploymentProblem& p) {
  if (p.instance == nullptr) throw ValidationError("deployment problem has no instance");
  if (p.budget < 0 || p.budget > p.instance->site_count()) {
    throw ValidationError("budget K must satisfy 0 <= K <= N");
  }
  if (p.scheme == Scheme::B && !(p.alpha >= 0.0 && p.alpha <= 1.0)) {
    throw ValidationError("scheme B requires alpha in [0,1]");
  }
}

inline double compute_epsilon_max(const DeploymentInstance& inst, int budget,
                                  std::size_t cap, int threads);

// Energy floor of the B-scheme constraint; computes the E-deployment
// optimum when the caller has not resolved it yet.
inline double energy_floor(const DeploymentProblem& p, int threads = 1) {
  if (p.scheme != Scheme::B) return 0.0;
  const double emax =
      p.epsilon_max ? *p.epsilon_max
                    : compute_epsilon_max(*p.instance, p.budget,
                                          p.exhaustive_cap, threads);
  if (!(emax >= 0)) throw ValidationError("epsilon_max must be >= 0");
  return p.alpha * emax - kLpFeasEps;
}

// Exhaustive search over all C(N,K) candidate plans in lexicographic
// combination order, evaluating the true clamped energy. Ties keep the
// first (lexicographically smallest) candidate; the parallel partition
// reduces in prefix order, so results are independent of thread count.
inline EvaluatedPlan solve_exhaustive(const DeploymentProblem& p, int threads = 1,
                                      SolveStats* stats = nullptr) {
  require_instance(p);
  const DeploymentInstance& inst = *p.instance;
  const int n = inst.site_count();
  const int k = p.budget;
  const double count = detail::combination_count(n, k);
  if (count > static_cast<double>(p.exhaustive_cap)) {
    throw TooLarge("C(" + std::to_string(n) + "," + std::to_string(k) + ") = " +
                   std::to_string(static_cast<long long>(count)) +
                   " exceeds the exhaustive cap of " +
                   std::to_string(p.exhaustive_cap));
  }
  if (stats != nullptr) stats->candidates = static_cast<long>(count);
  const double floor = energy_floor(p, threads);

  // Work items are combination prefixes (length 2 when K allows), enumerated
  // and reduced in lexicographic order.
  std::vector<std::vector<int>> prefixes;
  const int depth = std::min(k, 2);
  if (depth == 0) {
    prefixes.push_back({});
  } else if (depth == 1) {
    for (int a = 0; a <= n - k; ++a) prefixes.push_back({a});
  } else {
    for (int a = 0; a + k - 1 < n; ++a) {
      for (int b = a + 1; b + k - 2 < n; ++b) prefixes.push_back({a, b});
    }
  }

  std::vector<std::optional<detail::ExhaustiveBest>> results(prefixes.size());
  auto run_prefix = [&](std::size_t idx) {
    detail::ExhaustiveBest best(inst, p.scheme, floor);
    std::vector<int> combo(static_cast<std::size_t>(k));
    for (int t = 0; t < depth; ++t) combo[static_cast<std::size_t>(t)] = prefixes[idx][static_cast<std::size_t>(t)];
    detail::for_each_suffix_combination(
        combo, depth, n, [&](const std::vector<int>& c) { best.consider(c); });
    results[idx].emplace(std::move(best));
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(prefixes.size())));
  if (workers == 1) {
    for (std::size_t idx = 0; idx < prefixes.size(); ++idx) run_prefix(idx);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t idx = cursor.fetch_add(1);
          if (idx >= prefixes.size()) return;
          run_prefix(idx);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  bool found = false;
  double best_obj = 0.0;
  std::vector<int> best_combo;
  for (const auto& r : results) {
    if (!r || !r->found()) continue;
    if (!found || r->objective() > best_obj) {
      found = true;
      best_obj = r->objective();
      best_combo = r->combo();
    }
  }
  if (!found) {
    throw Infeasible("no deployment of size K=" + std::to_string(k) +
                     " satisfies the energy constraint");
  }
  return evaluate_plan(inst, detail::plan_from_combo(n, best_combo));
}

// Directional search for the I scheme: repeatedly deploys at the largest
// remaining WIT coefficient. Exact for the linear objective under the
// cardinality constraint.
inline EvaluatedPlan solve_greedy(const DeploymentProblem& p,
                                  SolveStats* stats = nullptr) {
  require_instance(p);
  if (p.scheme != Scheme::I) {
    throw SchemeMismatch("greedy (directional) search applies to scheme I only");
  }
  const DeploymentInstance& inst = *p.instance;
  std::vector<double> k = inst.wit_coeff;
  DeploymentPlan plan;
  plan.y.assign(k.size(), 0);
  for (int pick = 0; pick < p.budget; ++pick) {
    std::size_t best = 0;
    for (std::size_t ord = 1; ord < k.size(); ++ord) {
      if (k[ord] > k[best]) best = ord;  // ties keep the lowest index
    }
    plan.y[best] = 1;
    k[best] = -1.0;
  }
  if (stats != nullptr) stats->iterations = p.budget;
  return evaluate_plan(inst, plan);
}

// LP relaxation of the scheme under the given per-site bounds. Variables
// are the N deployment probabilities followed (for schemes E and B) by the
// M linearised per-user energy variables.
inline LpProblem build_relaxation(const DeploymentProblem& p,
                                  const std::vector<double>& lower,
                                  const std::vector<double>& upper) {
  require_instance(p);
  const DeploymentInstance& inst = *p.instance;
  const int n = inst.site_count();
  const int m = inst.user_count();
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n) {
    throw ValidationError("relaxation bounds must have one entry per site");
  }
  for (int ord = 0; ord < n; ++ord) {
    if (!(lower[ord] >= 0 && upper[ord] <= 1 && lower[ord] <= upper[ord])) {
      throw ValidationError("relaxation bounds must satisfy 0 <= lower <= upper <= 1");
    }
  }
  const bool with_energy = p.scheme != Scheme::I;
  const int vars = with_energy ? n + m : n;

  LpProblem lp;
  lp.objective.assign(static_cast<std::size_t>(vars), 0.0);
  if (p.scheme == Scheme::E) {
    for (int u = 0; u < m; ++u) lp.objective[static_cast<std::size_t>(n + u)] = 1.0;
  } else {
    for (int ord = 0; ord < n; ++ord) lp.objective[static_cast<std::size_t>(ord)] = inst.wit_coeff[ord];
  }
  lp.lower.assign(static_cast<std::size_t>(vars), 0.0);
  lp.upper.assign(static_cast<std::size_t>(vars),
                  std::numeric_limits<double>::infinity());
  for (int ord = 0; ord < n; ++ord) {
    lp.lower[static_cast<std::size_t>(ord)] = lower[ord];
    lp.upper[static_cast<std::size_t>(ord)] = upper[ord];
  }

  LpRow budget_row;
  budget_row.coeffs.assign(static_cast<std::size_t>(vars), 0.0);
  for (int ord = 0; ord < n; ++ord) budget_row.coeffs[static_cast<std::size_t>(ord)] = 1.0;
  budget_row.rel = Relation::Equal;
  budget_row.rhs = static_cast<double>(p.budget);
  lp.rows.push_back(std::move(budget_row));

  if (with_energy) {
    for (int u = 0; u < m; ++u) {
      LpRow row;  // R_u <= sum_s coeff[s][u] y_s
      row.coeffs.assign(static_cast<std::size_t>(vars), 0.0);
      for (int ord = 0; ord < n; ++ord) {
        row.coeffs[static_cast<std::size_t>(ord)] = -inst.energy_coeff_site[ord][u];
      }
      row.coeffs[static_cast<std::size_t>(n + u)] = 1.0;
      row.rel = Relation::LessEq;
      row.rhs = 0.0;
      lp.rows.push_back(std::move(row));
    }
    for (int u = 0; u < m; ++u) {
      LpRow row;  // R_u <= Q
      row.coeffs.assign(static_cast<std::size_t>(vars), 0.0);
      row.coeffs[static_cast<std::size_t>(n + u)] = 1.0;
      row.rel = Relation::LessEq;
      row.rhs = inst.battery();
      lp.rows.push_back(std::move(row));
    }
    if (p.scheme == Scheme::B) {
      if (!p.epsilon_max) {
        throw ValidationError(
            "epsilon_max must be resolved before building the B relaxation");
      }
      LpRow row;  // sum_u R_u >= alpha * epsilon_max
      row.coeffs.assign(static_cast<std::size_t>(vars), 0.0);
      for (int u = 0; u < m; ++u) row.coeffs[static_cast<std::size_t>(n + u)] = 1.0;
      row.rel = Relation::GreaterEq;
      row.rhs = p.alpha * *p.epsilon_max;
      lp.rows.push_back(std::move(row));
    }
  }
  return lp;
}

// Root LP relaxation with free [0,1] site bounds.
inline LpSolution solve_relaxation(const DeploymentProblem& p) {
  const int n = p.instance->site_count();
  return solve(build_relaxation(p, std::vector<double>(n, 0.0),
                                std::vector<double>(n, 1.0)));
}

// Branch-and-bound dive: solve the relaxation, then repeatedly fix the most
// fractional site to the better-scoring of its two integer bounds (child
// relaxations with the variable forced to 0 and to 1), until the relaxed
// solution is integral. One variable is pinned per iteration; there is no
// backtracking. The final plan is re-scored with the true clamped energy.
inline EvaluatedPlan solve_bnb_dive(const DeploymentProblem& p0, int threads = 1,
                                    SolveStats* stats = nullptr) {
  require_instance(p0);
  DeploymentProblem p = p0;
  if (p.scheme == Scheme::B && !p.epsilon_max) {
    p.epsilon_max =
        compute_epsilon_max(*p.instance, p.budget, p.exhaustive_cap, threads);
  }
  const DeploymentInstance& inst = *p.instance;
  const int n = inst.site_count();
  std::vector<double> lower(static_cast<std::size_t>(n), 0.0);
  std::vector<double> upper(static_cast<std::size_t>(n), 1.0);
  long lp_solves = 1;
  long iterations = 0;

  LpSolution current = solve(build_relaxation(p, lower, upper));
  if (current.status != LpStatus::Optimal) {
    throw RelaxationInfeasible("B&B dive: relaxation infeasible at the root");
  }

  const double int_tol = 1e-6;
  while (true) {
    int frac = -1;
    double best_dist = 0.5;
    for (int ord = 0; ord < n; ++ord) {
      const double y = current.x[static_cast<std::size_t>(ord)];
      if (std::abs(y - std::round(y)) <= int_tol) continue;
      const double dist = std::abs(y - 0.5);
      if (frac < 0 || dist < best_dist) {
        frac = ord;
        best_dist = dist;
      }
    }
    if (frac < 0) break;
    ++iterations;

    std::vector<double> up0 = upper;
    up0[static_cast<std::size_t>(frac)] = 0.0;  // floor child: y fixed to 0
    std::vector<double> lo1 = lower;
    lo1[static_cast<std::size_t>(frac)] = 1.0;  // ceil child: y fixed to 1
    const LpSolution child0 = solve(build_relaxation(p, lower, up0));
    const LpSolution child1 = solve(build_relaxation(p, lo1, upper));
    lp_solves += 2;

    const bool ok0 = child0.status == LpStatus::Optimal;
    const bool ok1 = child1.status == LpStatus::Optimal;
    if (!ok0 && !ok1) {
      throw Infeasible("B&B dive: both children infeasible at site ord " +
                       std::to_string(frac));
    }
    const bool take0 = ok0 && (!ok1 || child0.objective_value > child1.objective_value);
    if (take0) {
      upper = std::move(up0);
      current = child0;
    } else {
      lower = std::move(lo1);
      current = child1;
    }
  }

  if (stats != nullptr) {
    stats->iterations = iterations;
    stats->lp_solves = lp_solves;
  }

  DeploymentPlan plan;
  plan.y.assign(static_cast<std::size_t>(n), 0);
  int deployed = 0;
  for (int ord = 0; ord < n; ++ord) {
    plan.y[static_cast<std::size_t>(ord)] =
        std::round(current.x[static_cast<std::size_t>(ord)]) >= 1.0 ? 1 : 0;
    deployed += plan.y[static_cast<std::size_t>(ord)];
  }
  if (deployed != p.budget) {
    throw Infeasible("B&B dive produced a plan of size " +
                     std::to_string(deployed) + ", expected K=" +
                     std::to_string(p.budget));
  }
  EvaluatedPlan result = evaluate_plan(inst, plan);
  if (p.scheme == Scheme::B &&
      result.epsilon < p.alpha * *p.epsilon_max - kLpFeasEps) {
    throw Infeasible("B&B dive plan violates the energy constraint");
  }
  return result;
}

// Maximum harvestable energy for the budget: the E-deployment optimum,
// exhaustively when the candidate space fits the cap, otherwise via the
// dive.
inline double compute_epsilon_max(const DeploymentInstance& inst, int budget,
                                  std::size_t cap = 2000000, int threads = 1) {
  DeploymentProblem p;
  p.scheme = Scheme::E;
  p.budget = budget;
  p.instance = &inst;
  p.exhaustive_cap = cap;
  if (detail::combination_count(inst.site_count(), budget) <=
      static_cast<double>(cap)) {
    return solve_exhaustive(p, threads).epsilon;
  }
  return solve_bnb_dive(p, threads).epsilon;
}

// Resolves and caches the B-scheme energy ceiling on the problem.
inline double resolve_epsilon_max(DeploymentProblem& p, int threads = 1) {
  require_instance(p);
  if (!p.epsilon_max) {
    p.epsilon_max =
        compute_epsilon_max(*p.instance, p.budget, p.exhaustive_cap, threads);
  }
  return *p.epsilon_max;
}

// Baseline that ranks sites purely by aggregate visiting frequency and
// deploys at the top K, ties to the lowest flattened index. Frequencies
// within 1e-12 (relative) count as tied: the stationary solve is only good
// to its residual tolerance, so symmetric sites must not be separated by
// rounding noise.
inline EvaluatedPlan solve_s_baseline(const DeploymentInstance& inst, int budget) {
  if (budget < 0 || budget > inst.site_count()) {
    throw ValidationError("budget K must satisfy 0 <= K <= N");
  }
  const int n = inst.site_count();
  std::vector<double> freq(static_cast<std::size_t>(n), 0.0);
  for (const MobilityAnalysis& a : inst.analyses) {
    for (int ord = 0; ord < n; ++ord) freq[static_cast<std::size_t>(ord)] += a.stationary[static_cast<std::size_t>(ord)];
  }
  DeploymentPlan plan;
  plan.y.assign(static_cast<std::size_t>(n), 0);
  for (int pick = 0; pick < budget; ++pick) {
    std::size_t best = 0;
    double vmax = freq[0];
    for (std::size_t ord = 1; ord < freq.size(); ++ord) {
      if (freq[ord] > vmax) vmax = freq[ord];
    }
    const double tie_band = vmax - 1e-12 * (1.0 + std::abs(vmax));
    while (freq[best] < tie_band) ++best;
    plan.y[best] = 1;
    freq[best] = -1.0;
  }
  return evaluate_plan(inst, plan);
}

}  // namespace hapdeploy
