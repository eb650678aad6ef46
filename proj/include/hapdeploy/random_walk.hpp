#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "hapdeploy/errors.hpp"
#include "hapdeploy/grid.hpp"
#include "hapdeploy/mobility.hpp"
#include "hapdeploy/rng.hpp"

namespace hapdeploy {

// Accumulated accounting of one simulated walk. Vectors follow flattened
// site order; a "visit" is a region entry, i.e. a mid-street crossing.
struct WalkTrace {
  std::vector<std::int64_t> visits;
  std::vector<double> time_in_region;
  std::vector<double> time_in_wit;
  std::vector<double> time_in_wet;
  double elapsed = 0.0;
  std::uint64_t seed = 0;

  std::int64_t total_visits() const {
    std::int64_t acc = 0;
    for (auto v : visits) acc += v;
    return acc;
  }
};

struct EmpiricalDistributions {
  std::vector<double> visit_freq;  // estimates the stationary distribution
  std::vector<double> occupancy;   // estimates the time-occupancy distribution
};

namespace detail {

// One constant-speed stretch of a half-street, tagged with the circles it
// lies in. dt is the closed-form traversal time, so the walk accumulates no
// time-stepping error.
struct WalkPiece {
  double dt = 0.0;
  bool in_wit = false;
  bool in_wet = false;
};

// Pieces of a half-street at the given site, ordered centre -> mid-street.
// Split points are the crowded radius (speed change) and the WIT/WET radii
// (membership change); all lie strictly inside l/2 for a valid scenario.
inline std::vector<WalkPiece> half_street_pieces(const UserProfile& user,
                                                 const GridScenario& grid,
                                                 int ord) {
  const double half = grid.street_length / 2.0;
  std::vector<double> bp{0.0, grid.crowded_range[ord], grid.wet_range,
                         grid.wit_range, half};
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<WalkPiece> out;
  out.reserve(bp.size() - 1);
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double lo = bp[k], hi = bp[k + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const double speed =
        mid < grid.crowded_range[ord] ? user.crowd_speed[ord] : user.base_speed;
    WalkPiece piece;
    piece.dt = (hi - lo) / speed;
    piece.in_wit = mid < grid.wit_range;
    piece.in_wet = mid < grid.wet_range;
    out.push_back(piece);
  }
  return out;
}

}  // namespace detail

// Simulates a geometric random walk along the streets. The user starts at a
// uniformly drawn crossroad; `burn_in` street traversals are walked without
// accounting, after which the clock starts at the crossroad centre the user
// has reached and runs for exactly `horizon` seconds (the final stretch is
// clipped at the horizon). Deterministic for a fixed (user, grid, horizon,
// seed, burn_in).
inline WalkTrace simulate(const UserProfile& user, const GridScenario& grid,
                          double horizon, std::uint64_t seed, int burn_in = 1000) {
  if (!(horizon > 0)) throw ValidationError("simulation horizon must be > 0");
  if (burn_in < 0) throw ValidationError("burn_in must be >= 0");
  const int n = grid.site_count();

  // Validates rows and resolves uniform defaults.
  const TransitionMatrix tm = build_transition_matrix(user, grid);
  std::vector<std::vector<std::pair<int, double>>> cdf(n);
  for (int from = 0; from < n; ++from) {
    double acc = 0.0;
    for (int to = 0; to < n; ++to) {
      if (tm.at(from, to) > 0) {
        acc += tm.at(from, to);
        cdf[from].push_back({to, acc});
      }
    }
  }

  std::vector<std::vector<detail::WalkPiece>> pieces(n);
  for (int ord = 0; ord < n; ++ord) {
    pieces[ord] = detail::half_street_pieces(user, grid, ord);
  }

  SplitMix64 rng(seed);
  auto draw_next = [&](int from) {
    const double u = rng.next_double();
    for (const auto& [to, c] : cdf[from]) {
      if (u < c) return to;
    }
    return cdf[from].back().first;
  };

  int cur = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
  for (int t = 0; t < burn_in; ++t) cur = draw_next(cur);

  WalkTrace trace;
  trace.seed = seed;
  trace.visits.assign(n, 0);
  trace.time_in_region.assign(n, 0.0);
  trace.time_in_wit.assign(n, 0.0);
  trace.time_in_wet.assign(n, 0.0);

  double clock = 0.0;
  auto account = [&](int site, const detail::WalkPiece& piece) {
    double dt = piece.dt;
    bool more = true;
    if (clock + dt >= horizon) {
      dt = horizon - clock;
      more = false;
    }
    trace.time_in_region[site] += dt;
    if (piece.in_wit) trace.time_in_wit[site] += dt;
    if (piece.in_wet) trace.time_in_wet[site] += dt;
    clock = more ? clock + dt : horizon;
    return more;
  };

  bool running = true;
  while (running) {
    const int next = draw_next(cur);
    // Leave the current region: centre -> mid-street.
    for (const auto& piece : pieces[cur]) {
      if (!(running = account(cur, piece))) break;
    }
    if (!running) break;
    trace.visits[next] += 1;
    // Enter the next region: mid-street -> centre.
    const auto& in = pieces[next];
    for (auto it = in.rbegin(); it != in.rend(); ++it) {
      if (!(running = account(next, *it))) break;
    }
    cur = next;
  }
  trace.elapsed = horizon;
  return trace;
}

// Normalised estimators from a trace: visit frequencies (stationary
// distribution) and time occupancy (sojourn distribution).
inline EmpiricalDistributions empirical_distributions(const WalkTrace& trace) {
  const std::int64_t total = trace.total_visits();
  if (total <= 0 || !(trace.elapsed > 0)) {
    throw EmptyTrace("trace has no recorded visits");
  }
  EmpiricalDistributions out;
  out.visit_freq.resize(trace.visits.size());
  out.occupancy.resize(trace.visits.size());
  for (std::size_t k = 0; k < trace.visits.size(); ++k) {
    out.visit_freq[k] =
        static_cast<double>(trace.visits[k]) / static_cast<double>(total);
    out.occupancy[k] = trace.time_in_region[k] / trace.elapsed;
  }
  return out;
}

}  // namespace hapdeploy
