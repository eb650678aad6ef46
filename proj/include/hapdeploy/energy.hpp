#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "hapdeploy/errors.hpp"
#include "hapdeploy/grid.hpp"
#include "hapdeploy/mobility.hpp"

namespace hapdeploy {

// Binary placement over flattened sites.
struct DeploymentPlan {
  std::vector<std::uint8_t> y;

  int deployed_count() const {
    int k = 0;
    for (auto v : y) k += v != 0;
    return k;
  }
};

struct EvaluatedPlan {
  DeploymentPlan plan;
  double eta = 0.0;                     // WIT efficiency, in [0,1]
  std::vector<double> per_user_energy;  // unclamped joules per user
  double epsilon = 0.0;                 // battery-clamped total, joules
};

// Path loss at the given distance: flat at ref_loss inside the reference
// distance, power-law decay beyond it.
inline double path_loss(double distance, const PathLossModel& model) {
  if (distance <= model.ref_distance) return model.ref_loss;
  return model.ref_loss * std::pow(model.ref_distance / distance, model.exponent);
}

// n-point Gauss-Legendre quadrature of f over [a, b]. Nodes/weights are
// computed by Newton iteration on the Legendre polynomial, so any order is
// available without tables.
template <typename F>
double gauss_legendre(F&& f, double a, double b, int points) {
  std::vector<double> node(points), weight(points);
  const int half = (points + 1) / 2;
  for (int k = 0; k < half; ++k) {
    double x = std::cos(M_PI * (k + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= points; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    node[k] = -x;
    node[points - 1 - k] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weight[k] = w;
    weight[points - 1 - k] = w;
  }
  const double mid = 0.5 * (a + b), scale = 0.5 * (b - a);
  double acc = 0.0;
  for (int k = 0; k < points; ++k) {
    acc += weight[k] * f(mid + scale * node[k]);
  }
  return acc * scale;
}

// Closed-form RF energy harvested during one pass through the WET circle:
// the user crosses it along a diameter, picking up 2*delta*P*h(s)/v(s) per
// metre of approach distance s. The crowded circle switches the speed, the
// reference distance switches the path loss to its near-field plateau.
//
// When the crowded range lies inside the reference distance the formula's
// crowd term saturates at the near-field boundary (the integration below
// the reference distance is already covered by the plateau term), hence the
// clamp to ref_distance.
inline double energy_per_pass(const UserProfile& user, const GridScenario& grid,
                              const Site& site) {
  const int ord = site_ord(site, grid);
  const PathLossModel& pl = grid.path_loss;
  const double beta = pl.exponent;
  const double s0 = pl.ref_distance;
  const double re = grid.wet_range;
  const double rc = grid.crowded_range[ord];
  const double vc = user.crowd_speed[ord];
  const double v0 = user.base_speed;
  const double pre =
      2.0 * grid.rectify_eff * grid.tx_power * pl.ref_loss * s0 / (1.0 - beta);
  if (re <= rc) {
    return pre * (std::pow(re / s0, 1.0 - beta) - beta) / vc;
  }
  const double rc_eff = std::max(rc, s0);
  return pre * ((1.0 / vc - 1.0 / v0) * std::pow(rc_eff / s0, 1.0 - beta) +
                std::pow(re / s0, 1.0 - beta) / v0 - beta / vc);
}

// Quadrature evaluation of the same per-pass energy, used as an independent
// oracle for the closed form: numerically integrates P*h(s)/v(s) over the
// far-field part of the approach and adds the near-field plateau dwell.
inline double energy_per_pass_numeric(const UserProfile& user,
                                      const GridScenario& grid, const Site& site,
                                      int quad_points = 128) {
  if (quad_points < 64) throw ValidationError("quad_points must be >= 64");
  const int ord = site_ord(site, grid);
  const PathLossModel& pl = grid.path_loss;
  const double s0 = pl.ref_distance;
  const double re = grid.wet_range;
  const double rc = grid.crowded_range[ord];
  const double vc = user.crowd_speed[ord];
  const double v0 = user.base_speed;
  const double p = grid.tx_power;

  auto far_field = [&](double s) { return p * path_loss(s, pl); };
  double acc = p * pl.ref_loss * s0 / vc;  // near-field plateau, speed vc
  if (s0 < rc && rc < re) {
    acc += gauss_legendre(far_field, s0, rc, quad_points) / vc;
    acc += gauss_legendre(far_field, rc, re, quad_points) / v0;
  } else {
    const double v = (rc >= re) ? vc : v0;
    acc += gauss_legendre(far_field, s0, re, quad_points) / v;
  }
  return 2.0 * grid.rectify_eff * acc;
}

// WIT efficiency of a plan: fraction of the theoretically deliverable
// information actually delivered, i.e. total deployed WIT-circle time over
// M*T. Equals the sum of wit_coefficients over deployed sites.
inline double wit_efficiency(const std::vector<MobilityAnalysis>& analyses,
                             const DeploymentPlan& plan, const GridScenario& grid) {
  const int n = grid.site_count();
  double acc = 0.0;
  for (const MobilityAnalysis& a : analyses) {
    for (int ord = 0; ord < n; ++ord) {
      if (plan.y[ord]) acc += a.total_wit[ord];
    }
  }
  return acc / (static_cast<double>(analyses.size()) * grid.observation_time);
}

// Unclamped energy one user harvests over the horizon: passes through each
// deployed WET circle times the per-pass energy.
inline double user_energy(const MobilityAnalysis& analysis,
                          const std::vector<double>& energies_per_pass,
                          const DeploymentPlan& plan) {
  double acc = 0.0;
  for (std::size_t ord = 0; ord < energies_per_pass.size(); ++ord) {
    if (plan.y[ord]) {
      acc += analysis.total_wet[ord] / analysis.wet_sojourn[ord] *
             energies_per_pass[ord];
    }
  }
  return acc;
}

// WET efficiency: total harvested energy with each user clamped at its
// battery capacity.
inline double wet_efficiency(const std::vector<double>& per_user_energy,
                             double battery_capacity) {
  double acc = 0.0;
  for (double e : per_user_energy) acc += std::min(e, battery_capacity);
  return acc;
}

}  // namespace hapdeploy
