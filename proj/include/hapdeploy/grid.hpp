#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hapdeploy/errors.hpp"

namespace hapdeploy {

// Crossroad coordinate, 1-based in both dimensions: i is the vertical
// index (1..x_i), j the horizontal index (1..x_j).
struct Site {
  int i = 0;
  int j = 0;

  friend bool operator==(const Site& a, const Site& b) {
    return a.i == b.i && a.j == b.j;
  }
  friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
  friend bool operator<(const Site& a, const Site& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  }
};

inline std::string to_string(const Site& s) {
  return "(" + std::to_string(s.i) + "," + std::to_string(s.j) + ")";
}

// Log-distance path loss: ref_loss at ref_distance, decaying with the given
// exponent beyond it, clamped to ref_loss in the near field.
struct PathLossModel {
  double ref_distance = 1.0;  // metres
  double ref_loss = 0.003;    // dimensionless gain at ref_distance
  double exponent = 3.0;      // > 1
};

// The city grid with its physical constants and the planning problem
// parameters. Immutable after validation; safe to share across threads.
//
// All per-site vectors in this library are indexed in flattened site order:
// site (i,j) lives at position (i-1)*x_j + (j-1).
struct GridScenario {
  int x_i = 0;                        // crossroads, vertical dimension
  int x_j = 0;                        // crossroads, horizontal dimension
  double street_length = 0.0;         // metres, identical for every street
  double wit_range = 0.0;             // metres, information range
  double wet_range = 0.0;             // metres, energy range (< wit_range)
  std::vector<double> crowded_range;  // metres, per site
  double tx_power = 1.0;              // watts
  double rectify_eff = 0.8;           // RF-to-DC efficiency, in (0,1]
  double battery_capacity = 1.0;      // joules
  double observation_time = 0.0;      // seconds
  double alpha = 0.0;                 // WET-preference weight, in [0,1]
  int budget = 0;                     // number of access points to place
  double download_rate = 0.0;         // bits/s; cancels out of the WIT
                                      // efficiency ratio, kept for reporting
  PathLossModel path_loss;

  int site_count() const { return x_i * x_j; }
};

// One user's movement profile. crowd_speed follows flattened site order.
// turn_prob maps (from-site, to-site) flattened ordinals to probabilities;
// crossroads with no entries at all fall back to a uniform choice over their
// grid neighbours.
struct UserProfile {
  int id = 0;
  double base_speed = 0.0;
  std::vector<double> crowd_speed;
  std::map<std::pair<int, int>, double> turn_prob;
};

inline void check_site(const GridScenario& grid, const Site& s) {
  if (s.i < 1 || s.i > grid.x_i || s.j < 1 || s.j > grid.x_j) {
    throw IndexError("site " + to_string(s) + " outside " +
                     std::to_string(grid.x_i) + "x" + std::to_string(grid.x_j) +
                     " grid");
  }
}

// 1-based flattened index (i-1)*x_j + j.
inline int flatten(const Site& s, const GridScenario& grid) {
  check_site(grid, s);
  return (s.i - 1) * grid.x_j + s.j;
}

inline Site unflatten(int n, const GridScenario& grid) {
  if (n < 1 || n > grid.site_count()) {
    throw IndexError("flattened index " + std::to_string(n) + " outside 1.." +
                     std::to_string(grid.site_count()));
  }
  return Site{(n - 1) / grid.x_j + 1, (n - 1) % grid.x_j + 1};
}

// 0-based array offset of a site.
inline int site_ord(const Site& s, const GridScenario& grid) {
  return flatten(s, grid) - 1;
}

inline Site site_at(int ord, const GridScenario& grid) {
  return unflatten(ord + 1, grid);
}

// Grid-adjacent crossroads in ascending flattened order: 2 for corners,
// 3 for edges, 4 for interior sites.
inline std::vector<Site> neighbors(const GridScenario& grid, const Site& s) {
  check_site(grid, s);
  std::vector<Site> out;
  out.reserve(4);
  if (s.i > 1) out.push_back(Site{s.i - 1, s.j});
  if (s.j > 1) out.push_back(Site{s.i, s.j - 1});
  if (s.j < grid.x_j) out.push_back(Site{s.i, s.j + 1});
  if (s.i < grid.x_i) out.push_back(Site{s.i + 1, s.j});
  return out;
}

inline std::vector<int> neighbor_ords(const GridScenario& grid, int ord) {
  std::vector<int> out;
  out.reserve(4);
  for (const Site& n : neighbors(grid, site_at(ord, grid))) {
    out.push_back(site_ord(n, grid));
  }
  return out;
}

namespace detail {

inline void fail_validation(const std::string& msg) {
  throw ValidationError(msg);
}

}  // namespace detail

// Checks every scenario-level invariant; throws ValidationError naming the
// violated condition and the offending site. A scenario that passes is safe
// for all downstream analysis.
inline void validate_grid(const GridScenario& grid) {
  using detail::fail_validation;
  if (grid.x_i < 1 || grid.x_j < 1) {
    fail_validation("grid dimensions must be >= 1, got " +
                    std::to_string(grid.x_i) + "x" + std::to_string(grid.x_j));
  }
  if (!(grid.street_length > 0)) {
    fail_validation("street_length must be > 0");
  }
  if (grid.budget < 0 || grid.budget > grid.site_count()) {
    fail_validation("budget K must satisfy 0 <= K <= N, got K=" +
                    std::to_string(grid.budget) + ", N=" +
                    std::to_string(grid.site_count()));
  }
  if (!(grid.wet_range > 0) || !(grid.wit_range > 0)) {
    fail_validation("ranges must be > 0");
  }
  if (!(grid.wet_range < grid.wit_range)) {
    std::ostringstream os;
    os << "r^E < r^D violated: wet_range=" << grid.wet_range
       << " >= wit_range=" << grid.wit_range;
    fail_validation(os.str());
  }
  if (static_cast<int>(grid.crowded_range.size()) != grid.site_count()) {
    fail_validation("crowded_range has " +
                    std::to_string(grid.crowded_range.size()) +
                    " entries, expected " + std::to_string(grid.site_count()));
  }
  for (int ord = 0; ord < grid.site_count(); ++ord) {
    const double rc = grid.crowded_range[ord];
    if (!(rc >= 0)) {
      fail_validation("crowded range at " + to_string(site_at(ord, grid)) +
                      " must be >= 0");
    }
    const double rmax = std::max({grid.wit_range, grid.wet_range, rc});
    if (!(grid.street_length > 2.0 * rmax)) {
      std::ostringstream os;
      os << "l > 2*max(r^D, r^E, r^C) violated at crossroad "
         << to_string(site_at(ord, grid)) << ": l=" << grid.street_length
         << ", 2*max=" << 2.0 * rmax;
      fail_validation(os.str());
    }
  }
  if (!(grid.alpha >= 0 && grid.alpha <= 1)) {
    fail_validation("alpha must lie in [0,1]");
  }
  if (!(grid.rectify_eff > 0 && grid.rectify_eff <= 1)) {
    fail_validation("rectify_eff must lie in (0,1]");
  }
  if (!(grid.battery_capacity > 0)) {
    fail_validation("battery_capacity Q must be > 0");
  }
  if (!(grid.observation_time > 0)) {
    fail_validation("observation_time T must be > 0");
  }
  if (!(grid.tx_power > 0)) {
    fail_validation("tx_power P must be > 0");
  }
  const PathLossModel& pl = grid.path_loss;
  if (!(pl.ref_distance > 0)) {
    fail_validation("path-loss ref_distance must be > 0");
  }
  if (!(pl.ref_loss > 0 && pl.ref_loss <= 1)) {
    fail_validation("path-loss ref_loss must lie in (0,1]");
  }
  if (!(pl.exponent > 1)) {
    fail_validation("path-loss exponent must be > 1 (closed form divides by 1-beta)");
  }
  if (!(pl.ref_distance <= std::min(grid.wet_range, grid.wit_range))) {
    fail_validation("path-loss ref_distance must not exceed min(r^E, r^D)");
  }
}

// Per-user invariants against a validated grid.
inline void validate_user(const UserProfile& user, const GridScenario& grid) {
  using detail::fail_validation;
  const std::string who = "user " + std::to_string(user.id);
  if (!(user.base_speed > 0)) {
    fail_validation(who + ": base_speed must be > 0");
  }
  if (static_cast<int>(user.crowd_speed.size()) != grid.site_count()) {
    fail_validation(who + ": crowd_speed has " +
                    std::to_string(user.crowd_speed.size()) +
                    " entries, expected " + std::to_string(grid.site_count()));
  }
  for (int ord = 0; ord < grid.site_count(); ++ord) {
    const double vc = user.crowd_speed[ord];
    if (!(vc > 0 && vc <= user.base_speed)) {
      std::ostringstream os;
      os << who << ": crowd speed at " << to_string(site_at(ord, grid))
         << " must satisfy 0 < v <= base_speed, got v=" << vc
         << ", base=" << user.base_speed;
      fail_validation(os.str());
    }
  }
  // Turn probabilities: entries must target grid neighbours (or carry zero
  // probability), and every crossroad with explicit entries must normalise.
  std::vector<double> row_sum(grid.site_count(), 0.0);
  std::vector<bool> has_row(grid.site_count(), false);
  for (const auto& [edge, p] : user.turn_prob) {
    const auto [from, to] = edge;
    if (from < 0 || from >= grid.site_count() || to < 0 ||
        to >= grid.site_count()) {
      fail_validation(who + ": turn probability references a site outside the grid");
    }
    if (!(p >= 0)) {
      fail_validation(who + ": negative turn probability from " +
                      to_string(site_at(from, grid)));
    }
    const auto nbrs = neighbor_ords(grid, from);
    const bool adjacent = std::find(nbrs.begin(), nbrs.end(), to) != nbrs.end();
    if (!adjacent && p > 0) {
      fail_validation(who + ": positive turn probability from " +
                      to_string(site_at(from, grid)) + " to non-neighbour " +
                      to_string(site_at(to, grid)));
    }
    has_row[from] = true;
    row_sum[from] += p;
  }
  for (int ord = 0; ord < grid.site_count(); ++ord) {
    if (has_row[ord] && std::abs(row_sum[ord] - 1.0) > 1e-12) {
      std::ostringstream os;
      os << who << ": turn probabilities at " << to_string(site_at(ord, grid))
         << " sum to " << row_sum[ord] << ", expected 1";
      fail_validation(os.str());
    }
  }
}

inline void validate_scenario(const GridScenario& grid,
                              const std::vector<UserProfile>& users) {
  validate_grid(grid);
  for (const UserProfile& u : users) validate_user(u, grid);
}

}  // namespace hapdeploy
