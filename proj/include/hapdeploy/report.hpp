#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hapdeploy/deploy.hpp"
#include "hapdeploy/grid.hpp"
#include "hapdeploy/mobility.hpp"

namespace hapdeploy {

// Output schemas are versioned: CSV files carry a `# schema:` comment line,
// JSON documents a "schema" field. Column sets are documented in the README.

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// RFC-4180 quoting for cells that embed commas or quotes.
inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string plan_string(const DeploymentPlan& plan) {
  std::string s;
  s.reserve(plan.y.size());
  for (auto v : plan.y) s.push_back(v ? '1' : '0');
  return s;
}

// Fractional plans (LP relaxation output) join per-site probabilities with
// '|' so the plan stays a single CSV cell.
inline std::string plan_string(const std::vector<double>& y) {
  std::string s;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (k) s.push_back('|');
    s += format_number(y[k]);
  }
  return s;
}

struct PlanRecord {
  std::string scheme;
  std::string solver;
  int k = 0;
  double alpha = 0.0;
  double objective = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  long iterations = 0;
  long lp_solves = 0;
  double wall_time_ms = 0.0;
  std::string plan;
};

inline void write_csv(std::ostream& os, const std::vector<PlanRecord>& records) {
  os << "# schema: deploy-v1\n"
        "scheme,solver,k,alpha,objective,eta,epsilon,iterations,lp_solves,"
        "wall_time_ms,plan\n";
  for (const PlanRecord& r : records) {
    os << r.scheme << ',' << r.solver << ',' << r.k << ','
       << format_number(r.alpha) << ',' << format_number(r.objective) << ','
       << format_number(r.eta) << ',' << format_number(r.epsilon) << ','
       << r.iterations << ',' << r.lp_solves << ','
       << format_number(r.wall_time_ms) << ',' << r.plan << '\n';
  }
}

inline nlohmann::json to_json(const PlanRecord& r) {
  return {{"scheme", r.scheme},       {"solver", r.solver},
          {"k", r.k},                 {"alpha", r.alpha},
          {"objective", r.objective}, {"eta", r.eta},
          {"epsilon", r.epsilon},     {"iterations", r.iterations},
          {"lp_solves", r.lp_solves}, {"wall_time_ms", r.wall_time_ms},
          {"plan", r.plan}};
}

inline void write_json(std::ostream& os, const std::vector<PlanRecord>& records) {
  nlohmann::json rows = nlohmann::json::array();
  for (const PlanRecord& r : records) rows.push_back(to_json(r));
  os << nlohmann::json{{"schema", "deploy-v1"}, {"rows", rows}}.dump(1) << '\n';
}

// Per-site stationary/occupancy rows; empirical columns present only when a
// simulation backs them.
struct StationaryRow {
  int site_i = 0;
  int site_j = 0;
  double phi = 0.0;
  double pi_s = 0.0;
  std::optional<double> phi_empirical;
  std::optional<double> pi_empirical;
  std::optional<double> abs_err;  // max of the two estimator errors
};

inline void write_csv(std::ostream& os, const std::vector<StationaryRow>& rows,
                      bool with_sim) {
  if (with_sim) {
    os << "# schema: stationary-sim-v1\n"
          "site_i,site_j,phi_analytic,phi_empirical,pi_analytic,pi_empirical,"
          "abs_err\n";
  } else {
    os << "# schema: stationary-v1\nsite_i,site_j,phi,pi_s\n";
  }
  for (const StationaryRow& r : rows) {
    if (with_sim) {
      os << r.site_i << ',' << r.site_j << ',' << format_number(r.phi) << ','
         << format_number(r.phi_empirical.value_or(0.0)) << ','
         << format_number(r.pi_s) << ','
         << format_number(r.pi_empirical.value_or(0.0)) << ','
         << format_number(r.abs_err.value_or(0.0)) << '\n';
    } else {
      os << r.site_i << ',' << r.site_j << ',' << format_number(r.phi) << ','
         << format_number(r.pi_s) << '\n';
    }
  }
}

inline void write_json(std::ostream& os, const std::vector<StationaryRow>& rows,
                       bool with_sim) {
  nlohmann::json out_rows = nlohmann::json::array();
  for (const StationaryRow& r : rows) {
    nlohmann::json jr{{"site_i", r.site_i},
                      {"site_j", r.site_j},
                      {"phi", r.phi},
                      {"pi_s", r.pi_s}};
    if (with_sim) {
      jr["phi_empirical"] = r.phi_empirical.value_or(0.0);
      jr["pi_empirical"] = r.pi_empirical.value_or(0.0);
      jr["abs_err"] = r.abs_err.value_or(0.0);
    }
    out_rows.push_back(std::move(jr));
  }
  os << nlohmann::json{{"schema", with_sim ? "stationary-sim-v1" : "stationary-v1"},
                       {"rows", out_rows}}
            .dump(1)
     << '\n';
}

// Per-user analysis export.
inline void write_analysis_csv(std::ostream& os, const GridScenario& grid,
                               const MobilityAnalysis& a) {
  os << "# schema: analysis-v1\n"
        "site_i,site_j,phi,pi_s,d_s,d_d,d_e,tau_s,tau_d,tau_e\n";
  for (int ord = 0; ord < grid.site_count(); ++ord) {
    const Site s = site_at(ord, grid);
    os << s.i << ',' << s.j << ',' << format_number(a.stationary[ord]) << ','
       << format_number(a.sojourn_dist[ord]) << ','
       << format_number(a.region_sojourn[ord]) << ','
       << format_number(a.wit_sojourn[ord]) << ','
       << format_number(a.wet_sojourn[ord]) << ','
       << format_number(a.total_region[ord]) << ','
       << format_number(a.total_wit[ord]) << ','
       << format_number(a.total_wet[ord]) << '\n';
  }
}

struct SweepRow {
  std::string param;
  double value = 0.0;
  double eta_I = 0.0, epsilon_I = 0.0;
  double eta_E = 0.0, epsilon_E = 0.0;
  double eta_B = 0.0, epsilon_B = 0.0;
  double eta_S = 0.0, epsilon_S = 0.0;
  std::optional<double> tau_d_site;  // crowded-range sweeps only
  std::optional<double> tau_e_site;
};

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "# schema: sweep-v1\n"
        "param,value,eta_I,epsilon_I,eta_E,epsilon_E,eta_B,epsilon_B,eta_S,"
        "epsilon_S,tau_d_site,tau_e_site\n";
  for (const SweepRow& r : rows) {
    os << csv_cell(r.param) << ',' << format_number(r.value) << ','
       << format_number(r.eta_I) << ',' << format_number(r.epsilon_I) << ','
       << format_number(r.eta_E) << ',' << format_number(r.epsilon_E) << ','
       << format_number(r.eta_B) << ',' << format_number(r.epsilon_B) << ','
       << format_number(r.eta_S) << ',' << format_number(r.epsilon_S) << ',';
    if (r.tau_d_site) os << format_number(*r.tau_d_site);
    os << ',';
    if (r.tau_e_site) os << format_number(*r.tau_e_site);
    os << '\n';
  }
}

inline void write_json(std::ostream& os, const std::vector<SweepRow>& rows) {
  nlohmann::json out_rows = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    nlohmann::json jr{{"param", r.param},       {"value", r.value},
                      {"eta_I", r.eta_I},       {"epsilon_I", r.epsilon_I},
                      {"eta_E", r.eta_E},       {"epsilon_E", r.epsilon_E},
                      {"eta_B", r.eta_B},       {"epsilon_B", r.epsilon_B},
                      {"eta_S", r.eta_S},       {"epsilon_S", r.epsilon_S}};
    if (r.tau_d_site) jr["tau_d_site"] = *r.tau_d_site;
    if (r.tau_e_site) jr["tau_e_site"] = *r.tau_e_site;
    out_rows.push_back(std::move(jr));
  }
  os << nlohmann::json{{"schema", "sweep-v1"}, {"rows", out_rows}}.dump(1)
     << '\n';
}

}  // namespace hapdeploy
