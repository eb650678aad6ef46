#pragma once

// Test-side oracles, kept independent of the library code paths they check.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "hapdeploy/simplex.hpp"

namespace test_oracles {

// Stationary distribution by damped power iteration on an explicit
// row-major matrix; the damping handles periodic chains.
inline std::vector<double> power_iteration(const std::vector<double>& p, int n,
                                           int max_iters = 200000,
                                           double tol = 1e-13) {
  std::vector<double> x(n, 1.0 / n), y(n);
  for (int iter = 0; iter < max_iters; ++iter) {
    for (int col = 0; col < n; ++col) {
      double acc = 0.0;
      for (int row = 0; row < n; ++row) acc += x[row] * p[row * n + col];
      y[col] = 0.5 * (acc + x[col]);
    }
    double diff = 0.0, total = 0.0;
    for (int k = 0; k < n; ++k) total += y[k];
    for (int k = 0; k < n; ++k) {
      y[k] /= total;
      diff = std::max(diff, std::abs(y[k] - x[k]));
    }
    x = y;
    if (diff < tol) break;
  }
  return x;
}

// Dense Gaussian elimination; returns false on (near-)singularity.
inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& out) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-10) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      const double f = a[row][col] / a[col][col];
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  out.resize(n);
  for (int k = 0; k < n; ++k) out[k] = b[k] / a[k][k];
  return true;
}

struct VertexEnumResult {
  bool feasible = false;
  double objective = 0.0;
};

// Exhaustive vertex enumeration of a bounded LP: tries every choice of n
// active constraints (equality rows always active), solves the square
// system and keeps the best feasible point. Intended for problems with a
// dozen variables at most.
inline VertexEnumResult enumerate_vertices(const hapdeploy::LpProblem& p,
                                           double feas_tol = 1e-7) {
  using hapdeploy::Relation;
  const int n = static_cast<int>(p.var_count());

  struct Constraint {
    std::vector<double> coeffs;
    double rhs;
    Relation rel;
  };
  std::vector<Constraint> forced;  // equalities
  std::vector<Constraint> optional_cs;
  for (const auto& row : p.rows) {
    Constraint c{row.coeffs, row.rhs, row.rel};
    if (row.rel == Relation::Equal) {
      forced.push_back(std::move(c));
    } else {
      optional_cs.push_back(std::move(c));
    }
  }
  for (int j = 0; j < n; ++j) {
    Constraint lo;
    lo.coeffs.assign(n, 0.0);
    lo.coeffs[j] = 1.0;
    lo.rhs = p.lower[j];
    lo.rel = Relation::GreaterEq;
    optional_cs.push_back(std::move(lo));
    if (std::isfinite(p.upper[j])) {
      Constraint hi;
      hi.coeffs.assign(n, 0.0);
      hi.coeffs[j] = 1.0;
      hi.rhs = p.upper[j];
      hi.rel = Relation::LessEq;
      optional_cs.push_back(std::move(hi));
    }
  }

  const int need = n - static_cast<int>(forced.size());
  VertexEnumResult best;
  if (need < 0) return best;

  auto check_point = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j) {
      if (x[j] < p.lower[j] - feas_tol) return false;
      if (x[j] > p.upper[j] + feas_tol) return false;
    }
    for (const auto& row : p.rows) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j) lhs += row.coeffs[j] * x[j];
      const double tol = feas_tol * (1.0 + std::abs(row.rhs));
      if (row.rel == Relation::LessEq && lhs > row.rhs + tol) return false;
      if (row.rel == Relation::GreaterEq && lhs < row.rhs - tol) return false;
      if (row.rel == Relation::Equal && std::abs(lhs - row.rhs) > tol) return false;
    }
    return true;
  };

  std::vector<int> pick(static_cast<std::size_t>(std::max(need, 0)));
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == need) {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (const auto& c : forced) {
        a.push_back(c.coeffs);
        b.push_back(c.rhs);
      }
      for (int idx : pick) {
        a.push_back(optional_cs[static_cast<std::size_t>(idx)].coeffs);
        b.push_back(optional_cs[static_cast<std::size_t>(idx)].rhs);
      }
      std::vector<double> x;
      if (!solve_square(std::move(a), std::move(b), x)) return;
      if (!check_point(x)) return;
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += p.objective[j] * x[j];
      if (!best.feasible || obj > best.objective) {
        best.feasible = true;
        best.objective = obj;
      }
      return;
    }
    for (int idx = start; idx < static_cast<int>(optional_cs.size()); ++idx) {
      pick[static_cast<std::size_t>(depth)] = idx;
      recurse(idx + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return best;
}

// All size-k index subsets of {0..n-1}, lexicographic.
inline void for_each_combination(int n, int k,
                                 const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> combo(static_cast<std::size_t>(k));
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == k) {
      fn(combo);
      return;
    }
    for (int v = start; v <= n - (k - depth); ++v) {
      combo[static_cast<std::size_t>(depth)] = v;
      recurse(v + 1, depth + 1);
    }
  };
  recurse(0, 0);
}

}  // namespace test_oracles
