#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hapdeploy/errors.hpp"

namespace hapdeploy {

enum class Relation { LessEq, Equal, GreaterEq };

struct LpRow {
  std::vector<double> coeffs;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

// Maximisation problem with per-variable bounds. Lower bounds must be
// finite; upper bounds may be +infinity.
struct LpProblem {
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t var_count() const { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
};

enum class PivotRule {
  Bland,              // anti-cycling, guaranteed termination
  LargestCoefficient  // classic fast path; cycling raises CycleDetected
};

struct LpOptions {
  PivotRule pivot = PivotRule::Bland;
  long max_iterations = 1000000;  // cycle guard for the fast path
};

constexpr double kLpPivotEps = 1e-10;
constexpr double kLpFeasEps = 1e-9;

// Equality-form tableau data: variables are shifted to x' = x - lower >= 0,
// finite upper bounds become explicit rows, then every row gets a slack,
// surplus and/or artificial column as needed.
struct StandardForm {
  int num_structural = 0;
  int num_slack = 0;  // slack and surplus columns
  int num_artificial = 0;
  std::vector<std::vector<double>> a;  // row-major coefficient matrix
  std::vector<double> b;               // right-hand sides, all >= 0
  std::vector<double> cost;            // phase-2 objective over all columns
  double objective_shift = 0.0;        // objective(lower), added back on exit
  std::vector<int> basis;              // initial basic column per row

  int total_cols() const { return num_structural + num_slack + num_artificial; }
};

namespace detail {

inline void check_problem(const LpProblem& p) {
  const std::size_t n = p.var_count();
  if (p.lower.size() != n || p.upper.size() != n) {
    throw ValidationError("LP bounds dimension mismatch");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(p.lower[j])) {
      throw ValidationError("LP lower bounds must be finite");
    }
    if (p.upper[j] < p.lower[j]) {
      throw ValidationError("LP has lower > upper at variable " + std::to_string(j));
    }
  }
  for (const LpRow& row : p.rows) {
    if (row.coeffs.size() != n) {
      throw ValidationError("LP row dimension mismatch");
    }
  }
}

}  // namespace detail

inline StandardForm to_standard_form(const LpProblem& p) {
  detail::check_problem(p);
  const int n = static_cast<int>(p.var_count());

  // Shifted rows, then upper bounds appended as x'_j <= u_j - l_j.
  struct RawRow {
    std::vector<double> coeffs;
    Relation rel;
    double rhs;
  };
  std::vector<RawRow> raw;
  raw.reserve(p.rows.size() + p.var_count());
  double shift = 0.0;
  for (int j = 0; j < n; ++j) shift += p.objective[j] * p.lower[j];
  for (const LpRow& row : p.rows) {
    double rhs = row.rhs;
    for (int j = 0; j < n; ++j) rhs -= row.coeffs[j] * p.lower[j];
    raw.push_back(RawRow{row.coeffs, row.rel, rhs});
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(p.upper[j])) {
      std::vector<double> coeffs(n, 0.0);
      coeffs[j] = 1.0;
      raw.push_back(RawRow{std::move(coeffs), Relation::LessEq,
                           p.upper[j] - p.lower[j]});
    }
  }
  for (RawRow& row : raw) {
    if (row.rhs < 0) {
      for (double& c : row.coeffs) c = -c;
      row.rhs = -row.rhs;
      row.rel = row.rel == Relation::LessEq   ? Relation::GreaterEq
                : row.rel == Relation::GreaterEq ? Relation::LessEq
                                                 : Relation::Equal;
    }
  }

  StandardForm sf;
  sf.num_structural = n;
  sf.objective_shift = shift;
  const int m = static_cast<int>(raw.size());
  for (const RawRow& row : raw) {
    sf.num_slack += row.rel != Relation::Equal;
    sf.num_artificial += row.rel != Relation::LessEq;
  }
  const int cols = sf.total_cols();
  sf.a.assign(m, std::vector<double>(cols, 0.0));
  sf.b.resize(m);
  sf.basis.resize(m);
  sf.cost.assign(cols, 0.0);
  for (int j = 0; j < n; ++j) sf.cost[j] = p.objective[j];

  int next_slack = n;
  int next_artificial = n + sf.num_slack;
  for (int i = 0; i < m; ++i) {
    const RawRow& row = raw[i];
    for (int j = 0; j < n; ++j) sf.a[i][j] = row.coeffs[j];
    sf.b[i] = row.rhs;
    switch (row.rel) {
      case Relation::LessEq:
        sf.a[i][next_slack] = 1.0;
        sf.basis[i] = next_slack++;
        break;
      case Relation::GreaterEq:
        sf.a[i][next_slack++] = -1.0;
        sf.a[i][next_artificial] = 1.0;
        sf.basis[i] = next_artificial++;
        break;
      case Relation::Equal:
        sf.a[i][next_artificial] = 1.0;
        sf.basis[i] = next_artificial++;
        break;
    }
  }
  return sf;
}

namespace detail {

// Shared dense-tableau machinery for both simplex phases. Reduced costs are
// recomputed from the cost vector and the current basis each iteration;
// adequate at the few-hundred-variable scale this library targets.
class SimplexTableau {
public:
  SimplexTableau(StandardForm sf, const LpOptions& opts)
      : sf_(std::move(sf)), opts_(opts) {}

  // Maximises `cost` over the current tableau. `allowed` masks columns that
  // may enter the basis. Returns false on unboundedness.
  bool run(const std::vector<double>& cost, const std::vector<bool>& allowed) {
    long iterations = 0;
    while (true) {
      const int entering = pick_entering(cost, allowed);
      if (entering < 0) return true;  // optimal
      if (++iterations > opts_.max_iterations) {
        throw CycleDetected("simplex exceeded iteration cap (" +
                            std::to_string(opts_.max_iterations) + ")");
      }
      const int leaving = pick_leaving(entering);
      if (leaving < 0) return false;  // unbounded direction
      pivot(leaving, entering);
    }
  }

  double reduced_cost(const std::vector<double>& cost, int col) const {
    double z = 0.0;
    for (std::size_t i = 0; i < sf_.a.size(); ++i) {
      const double cb = cost[sf_.basis[i]];
      if (cb != 0.0) z += cb * sf_.a[i][col];
    }
    return cost[col] - z;
  }

  double objective(const std::vector<double>& cost) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < sf_.a.size(); ++i) {
      acc += cost[sf_.basis[i]] * sf_.b[i];
    }
    return acc;
  }

  // Pivots any artificial still basic (at zero level) onto a structural or
  // slack column; drops rows that are entirely zero (redundant constraints).
  void purge_artificials() {
    const int real_cols = sf_.num_structural + sf_.num_slack;
    for (std::size_t i = 0; i < sf_.a.size();) {
      if (sf_.basis[i] < real_cols) {
        ++i;
        continue;
      }
      int col = -1;
      for (int j = 0; j < real_cols; ++j) {
        if (std::abs(sf_.a[i][j]) > kLpPivotEps) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(static_cast<int>(i), col);
        ++i;
      } else {
        sf_.a.erase(sf_.a.begin() + static_cast<std::ptrdiff_t>(i));
        sf_.b.erase(sf_.b.begin() + static_cast<std::ptrdiff_t>(i));
        sf_.basis.erase(sf_.basis.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  std::vector<double> primal_values() const {
    std::vector<double> x(sf_.total_cols(), 0.0);
    for (std::size_t i = 0; i < sf_.a.size(); ++i) {
      x[sf_.basis[i]] = sf_.b[i];
    }
    return x;
  }

  const StandardForm& form() const { return sf_; }

private:
  int pick_entering(const std::vector<double>& cost,
                    const std::vector<bool>& allowed) const {
    int best = -1;
    double best_rc = kLpPivotEps;
    for (int j = 0; j < sf_.total_cols(); ++j) {
      if (!allowed[j]) continue;
      const double rc = reduced_cost(cost, j);
      if (rc <= kLpPivotEps) continue;
      if (opts_.pivot == PivotRule::Bland) return j;  // lowest index wins
      if (rc > best_rc) {
        best_rc = rc;
        best = j;
      }
    }
    return best;
  }

  // Minimum-ratio test; ties broken towards the smallest basic variable
  // index, which together with lowest-index entering is Bland's rule.
  int pick_leaving(int entering) const {
    int row = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sf_.a.size(); ++i) {
      const double coef = sf_.a[i][entering];
      if (coef <= kLpPivotEps) continue;
      const double ratio = sf_.b[i] / coef;
      if (ratio < best_ratio - kLpPivotEps ||
          (ratio <= best_ratio + kLpPivotEps &&
           (row < 0 || sf_.basis[i] < sf_.basis[row]))) {
        best_ratio = std::min(ratio, best_ratio);
        row = static_cast<int>(i);
      }
    }
    return row;
  }

  void pivot(int row, int col) {
    auto& a = sf_.a;
    auto& b = sf_.b;
    const double p = a[row][col];
    for (double& v : a[row]) v /= p;
    b[row] /= p;
    a[row][col] = 1.0;  // kill residual rounding on the pivot itself
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (static_cast<int>(i) == row) continue;
      const double f = a[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j < sf_.total_cols(); ++j) a[i][j] -= f * a[row][j];
      a[i][col] = 0.0;
      b[i] -= f * b[row];
      if (b[i] < 0 && b[i] > -kLpFeasEps) b[i] = 0.0;
    }
    sf_.basis[row] = col;
  }

  StandardForm sf_;
  LpOptions opts_;
};

}  // namespace detail

// Two-phase primal simplex over the dense tableau. Phase 1 minimises the
// artificial variables to find a basic feasible point; phase 2 maximises the
// objective. Deterministic for a fixed pivot rule.
inline LpSolution solve(const LpProblem& p, const LpOptions& opts = {}) {
  StandardForm sf = to_standard_form(p);
  const int n = sf.num_structural;
  const int real_cols = sf.num_structural + sf.num_slack;
  const int cols = sf.total_cols();
  detail::SimplexTableau tableau(std::move(sf), opts);

  if (tableau.form().num_artificial > 0) {
    std::vector<double> phase1_cost(cols, 0.0);
    for (int j = real_cols; j < cols; ++j) phase1_cost[j] = -1.0;
    std::vector<bool> allowed(cols, true);
    tableau.run(phase1_cost, allowed);  // bounded below by -sum(b)
    double scale = 1.0;
    for (double bv : tableau.form().b) scale = std::max(scale, std::abs(bv));
    if (-tableau.objective(phase1_cost) > kLpFeasEps * scale) {
      return LpSolution{LpStatus::Infeasible, {}, 0.0};
    }
    tableau.purge_artificials();
  }

  std::vector<bool> allowed(cols, true);
  for (int j = real_cols; j < cols; ++j) allowed[j] = false;
  if (!tableau.run(tableau.form().cost, allowed)) {
    return LpSolution{LpStatus::Unbounded, {},
                      std::numeric_limits<double>::infinity()};
  }

  const std::vector<double> shifted = tableau.primal_values();
  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.x.resize(n);
  sol.objective_value = 0.0;
  for (int j = 0; j < n; ++j) {
    sol.x[j] = p.lower[j] + shifted[j];
    sol.objective_value += p.objective[j] * sol.x[j];
  }
  return sol;
}

// Feasibility certificate: every row within 1e-9*(1+|rhs|), every bound
// within 1e-9.
inline bool satisfies(const LpProblem& p, const std::vector<double>& x,
                      double row_tol = kLpFeasEps, double bound_tol = kLpFeasEps) {
  if (x.size() != p.var_count()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < p.lower[j] - bound_tol) return false;
    if (x[j] > p.upper[j] + bound_tol) return false;
  }
  for (const LpRow& row : p.rows) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coeffs[j] * x[j];
    const double tol = row_tol * (1.0 + std::abs(row.rhs));
    switch (row.rel) {
      case Relation::LessEq:
        if (lhs > row.rhs + tol) return false;
        break;
      case Relation::GreaterEq:
        if (lhs < row.rhs - tol) return false;
        break;
      case Relation::Equal:
        if (std::abs(lhs - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

// Plain-text dump, one line per row: `coeffs... REL rhs`, preceded by the
// objective and followed by the bounds. Used for debugging and test
// fixtures.
inline std::string dump(const LpProblem& p) {
  std::ostringstream os;
  os.precision(17);
  os << "max:";
  for (double c : p.objective) os << ' ' << c;
  os << '\n';
  for (const LpRow& row : p.rows) {
    for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
      if (j) os << ' ';
      os << row.coeffs[j];
    }
    os << (row.rel == Relation::LessEq  ? " <= "
           : row.rel == Relation::Equal ? " = "
                                        : " >= ")
       << row.rhs << '\n';
  }
  os << "lb:";
  for (double v : p.lower) os << ' ' << v;
  os << "\nub:";
  for (double v : p.upper) os << ' ' << v;
  os << '\n';
  return os.str();
}

}  // namespace hapdeploy
