#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "hapdeploy/errors.hpp"
#include "hapdeploy/grid.hpp"

namespace hapdeploy {

// Dense row-stochastic matrix over flattened site states.
struct TransitionMatrix {
  int n = 0;
  std::vector<double> p;  // row-major n*n

  double at(int row, int col) const { return p[static_cast<std::size_t>(row) * n + col]; }
  double& at(int row, int col) { return p[static_cast<std::size_t>(row) * n + col]; }
};

// Per-user mobility statistics. All vectors follow flattened site order.
struct MobilityAnalysis {
  std::vector<double> stationary;      // state-visit distribution
  std::vector<double> region_sojourn;  // seconds per region visit
  std::vector<double> wit_sojourn;     // seconds per WIT-circle pass
  std::vector<double> wet_sojourn;     // seconds per WET-circle pass
  std::vector<double> sojourn_dist;    // time-occupancy distribution
  std::vector<double> total_region;    // seconds over the horizon
  std::vector<double> total_wit;
  std::vector<double> total_wet;
  bool periodic = false;  // chain is periodic (solution still unique)
};

inline TransitionMatrix build_transition_matrix(const UserProfile& user,
                                                const GridScenario& grid) {
  const int n = grid.site_count();
  TransitionMatrix tm;
  tm.n = n;
  tm.p.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<bool> has_row(n, false);
  for (const auto& [edge, p] : user.turn_prob) {
    has_row[edge.first] = true;
  }
  for (int from = 0; from < n; ++from) {
    const auto nbrs = neighbor_ords(grid, from);
    if (nbrs.empty()) {
      throw ValidationError("site " + to_string(site_at(from, grid)) +
                            " has no neighbours; chain undefined");
    }
    if (has_row[from]) {
      for (int to : nbrs) {
        auto it = user.turn_prob.find({from, to});
        if (it != user.turn_prob.end()) tm.at(from, to) = it->second;
      }
    } else {
      const double p = 1.0 / static_cast<double>(nbrs.size());
      for (int to : nbrs) tm.at(from, to) = p;
    }
    double sum = 0.0;
    for (int to = 0; to < n; ++to) sum += tm.at(from, to);
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError("transition row for site " +
                            to_string(site_at(from, grid)) + " sums to " +
                            std::to_string(sum));
    }
  }
  return tm;
}

namespace detail {

// Strong connectivity of the positive-probability digraph.
inline bool strongly_connected(const TransitionMatrix& tm) {
  const int n = tm.n;
  auto reachable = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        const double p = transpose ? tm.at(v, u) : tm.at(u, v);
        if (p > 0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reachable(false) && reachable(true);
}

// Period of an irreducible chain: gcd over edges (u,v) of depth(u)+1-depth(v)
// on a BFS tree. Aperiodic iff the gcd is 1.
inline int chain_period(const TransitionMatrix& tm) {
  const int n = tm.n;
  std::vector<int> depth(n, -1);
  std::vector<int> queue{0};
  depth[0] = 0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int u = queue[qi];
    for (int v = 0; v < n; ++v) {
      if (tm.at(u, v) > 0 && depth[v] < 0) {
        depth[v] = depth[u] + 1;
        queue.push_back(v);
      }
    }
  }
  int g = 0;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (tm.at(u, v) > 0) {
        g = std::gcd(g, std::abs(depth[u] + 1 - depth[v]));
      }
    }
  }
  return g == 0 ? 1 : g;
}

inline double stationary_residual(const TransitionMatrix& tm,
                                  const std::vector<double>& phi) {
  double worst = 0.0;
  for (int col = 0; col < tm.n; ++col) {
    double acc = 0.0;
    for (int row = 0; row < tm.n; ++row) acc += phi[row] * tm.at(row, col);
    worst = std::max(worst, std::abs(acc - phi[col]));
  }
  return worst;
}

// Gaussian elimination with partial pivoting on (P^T - I) phi = 0 with the
// first equation replaced by sum(phi) = 1. Returns empty on singularity.
inline std::vector<double> stationary_direct(const TransitionMatrix& tm) {
  const int n = tm.n;
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (int col = 0; col < n; ++col) a[0][col] = 1.0;
  a[0][n] = 1.0;
  for (int row = 1; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      a[row][col] = tm.at(col, row) - (row == col ? 1.0 : 0.0);
    }
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-14) return {};
    std::swap(a[col], a[pivot]);
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      const double f = a[row][col] / a[col][col];
      if (f == 0.0) continue;
      for (int k = col; k <= n; ++k) a[row][k] -= f * a[col][k];
    }
  }
  std::vector<double> phi(n);
  for (int row = 0; row < n; ++row) phi[row] = a[row][n] / a[row][row];
  return phi;
}

// Power iteration on the lazy chain (P+I)/2, which shares the stationary
// vector but is aperiodic, so it converges even for bipartite grids.
inline std::vector<double> stationary_power(const TransitionMatrix& tm) {
  const int n = tm.n;
  std::vector<double> phi(n, 1.0 / n);
  std::vector<double> next(n);
  for (long iter = 0; iter < 1000000; ++iter) {
    for (int col = 0; col < n; ++col) {
      double acc = 0.0;
      for (int row = 0; row < n; ++row) acc += phi[row] * tm.at(row, col);
      next[col] = 0.5 * (acc + phi[col]);
    }
    double diff = 0.0;
    for (int k = 0; k < n; ++k) diff = std::max(diff, std::abs(next[k] - phi[k]));
    phi.swap(next);
    if (diff <= 1e-12) break;
  }
  return phi;
}

}  // namespace detail

inline bool is_periodic(const TransitionMatrix& tm) {
  return detail::chain_period(tm) > 1;
}

// Unique solution of phi = phi P, sum(phi) = 1. Requires irreducibility;
// periodicity is reported through *periodic (the solution still exists and
// is unique) rather than treated as an error.
inline std::vector<double> stationary_distribution(const TransitionMatrix& tm,
                                                   bool* periodic = nullptr) {
  if (tm.n < 1) throw ValidationError("empty transition matrix");
  for (int row = 0; row < tm.n; ++row) {
    double sum = 0.0;
    for (int col = 0; col < tm.n; ++col) {
      if (tm.at(row, col) < 0) throw ValidationError("negative transition probability");
      sum += tm.at(row, col);
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError("transition matrix row " + std::to_string(row) +
                            " is not stochastic");
    }
  }
  if (!detail::strongly_connected(tm)) {
    throw NotErgodic("transition graph is reducible; stationary distribution not unique");
  }
  if (periodic != nullptr) *periodic = is_periodic(tm);

  std::vector<double> phi = detail::stationary_direct(tm);
  bool ok = !phi.empty();
  if (ok) {
    for (double v : phi) {
      if (!(v > -1e-9) || !std::isfinite(v)) ok = false;
    }
  }
  if (ok && detail::stationary_residual(tm, phi) > 1e-10) ok = false;
  if (!ok) phi = detail::stationary_power(tm);

  double total = 0.0;
  for (double& v : phi) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : phi) v /= total;
  if (detail::stationary_residual(tm, phi) > 1e-10) {
    throw Error("stationary solve failed to reach the residual tolerance");
  }
  return phi;
}

namespace detail {

// Time for the user to cover the distance from `radius` in to the crossroad
// centre (equivalently centre out to `radius`): the crowded part at the
// site's crowd speed, the remainder at base speed.
inline double approach_time(const UserProfile& user, const GridScenario& grid,
                            int ord, double radius) {
  const double rc = grid.crowded_range[ord];
  const double vc = user.crowd_speed[ord];
  if (radius < rc) return radius / vc;
  return rc / vc + (radius - rc) / user.base_speed;
}

}  // namespace detail

// Per-visit time inside the square region: distance l through it, crossing
// the crowded circle along a diameter.
inline double region_sojourn(const UserProfile& user, const GridScenario& grid,
                             const Site& site) {
  const int ord = site_ord(site, grid);
  return 2.0 * detail::approach_time(user, grid, ord, grid.street_length / 2.0);
}

// Per-pass time inside the WIT circle (diameter 2 r^D through the centre).
inline double wit_sojourn(const UserProfile& user, const GridScenario& grid,
                          const Site& site) {
  const int ord = site_ord(site, grid);
  return 2.0 * detail::approach_time(user, grid, ord, grid.wit_range);
}

// Per-pass time inside the WET circle.
inline double wet_sojourn(const UserProfile& user, const GridScenario& grid,
                          const Site& site) {
  const int ord = site_ord(site, grid);
  return 2.0 * detail::approach_time(user, grid, ord, grid.wet_range);
}

// Full per-user analysis: stationary distribution, per-visit sojourns,
// time-occupancy distribution and totals over the observation horizon.
// Summations run in ascending flattened order for determinism.
inline MobilityAnalysis analyze(const UserProfile& user, const GridScenario& grid) {
  const int n = grid.site_count();
  const TransitionMatrix tm = build_transition_matrix(user, grid);
  MobilityAnalysis out;
  out.stationary = stationary_distribution(tm, &out.periodic);
  out.region_sojourn.resize(n);
  out.wit_sojourn.resize(n);
  out.wet_sojourn.resize(n);
  for (int ord = 0; ord < n; ++ord) {
    const Site s = site_at(ord, grid);
    out.region_sojourn[ord] = region_sojourn(user, grid, s);
    out.wit_sojourn[ord] = wit_sojourn(user, grid, s);
    out.wet_sojourn[ord] = wet_sojourn(user, grid, s);
  }
  double norm = 0.0;
  for (int ord = 0; ord < n; ++ord) {
    norm += out.stationary[ord] * out.region_sojourn[ord];
  }
  out.sojourn_dist.resize(n);
  out.total_region.resize(n);
  out.total_wit.resize(n);
  out.total_wet.resize(n);
  const double horizon = grid.observation_time;
  for (int ord = 0; ord < n; ++ord) {
    out.sojourn_dist[ord] = out.stationary[ord] * out.region_sojourn[ord] / norm;
    out.total_region[ord] = out.sojourn_dist[ord] * horizon;
    out.total_wit[ord] =
        out.total_region[ord] * out.wit_sojourn[ord] / out.region_sojourn[ord];
    out.total_wet[ord] =
        out.total_region[ord] * out.wet_sojourn[ord] / out.region_sojourn[ord];
  }
  return out;
}

// Analyses for a whole population, annotating ergodicity failures with the
// offending user id.
inline std::vector<MobilityAnalysis> analyze_all(const std::vector<UserProfile>& users,
                                                 const GridScenario& grid) {
  std::vector<MobilityAnalysis> out;
  out.reserve(users.size());
  for (const UserProfile& u : users) {
    try {
      out.push_back(analyze(u, grid));
    } catch (const NotErgodic& e) {
      throw NotErgodic("user " + std::to_string(u.id) + ": " + e.what());
    }
  }
  return out;
}

// Per-site WIT coefficients: the fraction of total user-time spent inside
// each site's WIT circle. The WIT efficiency of a deployment is the sum of
// these coefficients over deployed sites.
inline std::vector<double> wit_coefficients(const std::vector<MobilityAnalysis>& analyses,
                                            int user_count, double horizon) {
  if (analyses.empty()) return {};
  const std::size_t n = analyses.front().total_wit.size();
  std::vector<double> k(n, 0.0);
  for (const MobilityAnalysis& a : analyses) {
    for (std::size_t ord = 0; ord < n; ++ord) k[ord] += a.total_wit[ord];
  }
  const double denom = static_cast<double>(user_count) * horizon;
  for (double& v : k) v /= denom;
  return k;
}

}  // namespace hapdeploy
