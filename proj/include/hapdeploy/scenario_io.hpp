#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hapdeploy/errors.hpp"
#include "hapdeploy/grid.hpp"
#include "hapdeploy/rng.hpp"

namespace hapdeploy {

using Scenario = std::pair<GridScenario, std::vector<UserProfile>>;

namespace detail {

inline std::vector<double> read_matrix(const nlohmann::json& j, int x_i, int x_j,
                                       const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != x_i) {
    throw ParseError(what + " must be an array of " + std::to_string(x_i) +
                     " rows");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(x_i) * x_j);
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != x_j) {
      throw ParseError(what + " rows must have " + std::to_string(x_j) +
                       " entries");
    }
    for (const auto& v : row) out.push_back(v.get<double>());
  }
  return out;
}

inline nlohmann::json write_matrix(const std::vector<double>& m, int x_i, int x_j) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < x_i; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < x_j; ++j) row.push_back(m[static_cast<std::size_t>(i) * x_j + j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline int site_ord_checked(const nlohmann::json& ij, const GridScenario& grid,
                            const std::string& what) {
  if (!ij.is_array() || ij.size() != 2) {
    throw ParseError(what + " must be a [i,j] pair");
  }
  const Site s{ij[0].get<int>(), ij[1].get<int>()};
  try {
    return site_ord(s, grid);
  } catch (const IndexError& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace detail

// Parses a scenario document. Throws ParseError for schema problems; the
// caller is expected to validate afterwards (load_scenario does both).
inline Scenario scenario_from_json(const nlohmann::json& doc) {
  GridScenario grid;
  try {
    const auto& g = doc.at("grid");
    grid.x_i = g.at("x_i").get<int>();
    grid.x_j = g.at("x_j").get<int>();
    grid.street_length = g.at("street_length").get<double>();
    const auto& ranges = doc.at("ranges");
    grid.wit_range = ranges.at("wit").get<double>();
    grid.wet_range = ranges.at("wet").get<double>();
    if (grid.x_i >= 1 && grid.x_j >= 1) {
      grid.crowded_range =
          detail::read_matrix(ranges.at("crowded"), grid.x_i, grid.x_j, "ranges.crowded");
    }
    const auto& ph = doc.at("physics");
    grid.tx_power = ph.at("tx_power").get<double>();
    grid.rectify_eff = ph.at("rectify_eff").get<double>();
    grid.path_loss.ref_distance = ph.at("ref_distance").get<double>();
    grid.path_loss.ref_loss = ph.at("ref_loss").get<double>();
    grid.path_loss.exponent = ph.at("exponent").get<double>();
    const auto& pr = doc.at("problem");
    grid.budget = pr.at("budget").get<int>();
    grid.alpha = pr.at("alpha").get<double>();
    grid.battery_capacity = pr.at("battery_capacity").get<double>();
    grid.observation_time = pr.at("observation_time").get<double>();
    grid.download_rate = pr.at("download_rate").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario schema error: ") + e.what());
  }

  std::vector<UserProfile> users;
  try {
    const auto& ju = doc.at("users");
    if (!ju.is_array()) throw ParseError("users must be an array");
    for (const auto& entry : ju) {
      UserProfile user;
      user.id = entry.at("id").get<int>();
      user.base_speed = entry.at("base_speed").get<double>();
      user.crowd_speed = detail::read_matrix(entry.at("crowd_speed"), grid.x_i,
                                             grid.x_j, "users.crowd_speed");
      if (entry.contains("turn_prob")) {
        for (const auto& tp : entry.at("turn_prob")) {
          const int from = detail::site_ord_checked(tp.at("from"), grid, "turn_prob.from");
          const int to = detail::site_ord_checked(tp.at("to"), grid, "turn_prob.to");
          user.turn_prob[{from, to}] = tp.at("p").get<double>();
        }
      }
      users.push_back(std::move(user));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario schema error: ") + e.what());
  }
  return {std::move(grid), std::move(users)};
}

inline nlohmann::json scenario_to_json(const GridScenario& grid,
                                       const std::vector<UserProfile>& users) {
  nlohmann::json doc;
  doc["grid"] = {{"x_i", grid.x_i},
                 {"x_j", grid.x_j},
                 {"street_length", grid.street_length}};
  doc["ranges"] = {{"wit", grid.wit_range},
                   {"wet", grid.wet_range},
                   {"crowded", detail::write_matrix(grid.crowded_range, grid.x_i, grid.x_j)}};
  doc["physics"] = {{"tx_power", grid.tx_power},
                    {"rectify_eff", grid.rectify_eff},
                    {"ref_distance", grid.path_loss.ref_distance},
                    {"ref_loss", grid.path_loss.ref_loss},
                    {"exponent", grid.path_loss.exponent}};
  doc["problem"] = {{"budget", grid.budget},
                    {"alpha", grid.alpha},
                    {"battery_capacity", grid.battery_capacity},
                    {"observation_time", grid.observation_time},
                    {"download_rate", grid.download_rate}};
  nlohmann::json ju = nlohmann::json::array();
  for (const UserProfile& user : users) {
    nlohmann::json entry;
    entry["id"] = user.id;
    entry["base_speed"] = user.base_speed;
    entry["crowd_speed"] = detail::write_matrix(user.crowd_speed, grid.x_i, grid.x_j);
    if (!user.turn_prob.empty()) {
      nlohmann::json tp = nlohmann::json::array();
      for (const auto& [edge, p] : user.turn_prob) {
        const Site from = site_at(edge.first, grid);
        const Site to = site_at(edge.second, grid);
        tp.push_back({{"from", {from.i, from.j}}, {"to", {to.i, to.j}}, {"p", p}});
      }
      entry["turn_prob"] = std::move(tp);
    }
    ju.push_back(std::move(entry));
  }
  doc["users"] = std::move(ju);
  return doc;
}

// Loads and fully validates a scenario file. ParseError covers unreadable
// files and schema problems; ValidationError names the violated invariant.
// No partially valid scenario is ever returned.
inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed JSON in " + path + ": " + e.what());
  }
  Scenario sc = scenario_from_json(doc);
  if (sc.second.empty()) {
    throw ValidationError("scenario must define at least one user");
  }
  validate_scenario(sc.first, sc.second);
  return sc;
}

inline void save_scenario(const std::string& path, const GridScenario& grid,
                          const std::vector<UserProfile>& users) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write scenario file: " + path);
  out << scenario_to_json(grid, users).dump(1) << '\n';
}

// Reproducible randomised scenario generation. Crowded ranges, speeds and
// turning weights are drawn from the configured intervals with SplitMix64,
// in a fixed order (grid first, then users by ascending id), so a seed
// pins the scenario exactly.
struct ScenarioGenConfig {
  int x_i = 5;
  int x_j = 5;
  double street_length = 200.0;
  double wit_range = 50.0;
  double wet_range = 10.0;
  double crowd_min = 5.0;
  double crowd_max = 60.0;
  double tx_power = 1.0;
  double rectify_eff = 0.8;
  double battery_capacity = 1.0;
  double observation_time = 36000.0;  // 10 hours
  double alpha = 0.97;
  int budget = 8;
  double download_rate = 1e6;
  PathLossModel path_loss{1.0, 0.003, 3.0};
  int user_count = 100;
  double base_speed_min = 1.0;
  double base_speed_max = 2.0;
  double crowd_speed_frac_min = 0.3;  // crowd speed as a fraction of base
  double crowd_speed_frac_max = 0.9;
  double turn_weight_min = 0.25;  // per-street weights, normalised per site
  double turn_weight_max = 1.0;
  bool uniform_turning = false;
  std::uint64_t seed = 1;
};

inline Scenario generate_scenario(const ScenarioGenConfig& cfg) {
  GridScenario grid;
  grid.x_i = cfg.x_i;
  grid.x_j = cfg.x_j;
  grid.street_length = cfg.street_length;
  grid.wit_range = cfg.wit_range;
  grid.wet_range = cfg.wet_range;
  grid.tx_power = cfg.tx_power;
  grid.rectify_eff = cfg.rectify_eff;
  grid.battery_capacity = cfg.battery_capacity;
  grid.observation_time = cfg.observation_time;
  grid.alpha = cfg.alpha;
  grid.budget = cfg.budget;
  grid.download_rate = cfg.download_rate;
  grid.path_loss = cfg.path_loss;

  const int n = grid.site_count();
  SplitMix64 grid_rng(derive_seed(cfg.seed, 0));
  grid.crowded_range.resize(static_cast<std::size_t>(n));
  for (int ord = 0; ord < n; ++ord) {
    grid.crowded_range[static_cast<std::size_t>(ord)] =
        grid_rng.next_double(cfg.crowd_min, cfg.crowd_max);
  }

  std::vector<UserProfile> users;
  users.reserve(static_cast<std::size_t>(cfg.user_count));
  for (int u = 1; u <= cfg.user_count; ++u) {
    SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(u)));
    UserProfile user;
    user.id = u;
    user.base_speed = rng.next_double(cfg.base_speed_min, cfg.base_speed_max);
    user.crowd_speed.resize(static_cast<std::size_t>(n));
    for (int ord = 0; ord < n; ++ord) {
      user.crowd_speed[static_cast<std::size_t>(ord)] =
          user.base_speed *
          rng.next_double(cfg.crowd_speed_frac_min, cfg.crowd_speed_frac_max);
    }
    if (!cfg.uniform_turning) {
      for (int ord = 0; ord < n; ++ord) {
        const auto nbrs = neighbor_ords(grid, ord);
        std::vector<double> w(nbrs.size());
        double total = 0.0;
        for (double& v : w) total += (v = rng.next_double(cfg.turn_weight_min,
                                                          cfg.turn_weight_max));
        double acc = 0.0;
        for (std::size_t t = 0; t + 1 < nbrs.size(); ++t) {
          const double p = w[t] / total;
          user.turn_prob[{ord, nbrs[t]}] = p;
          acc += p;
        }
        // Last neighbour takes the exact remainder so rows sum to 1.
        user.turn_prob[{ord, nbrs.back()}] = 1.0 - acc;
      }
    }
    users.push_back(std::move(user));
  }
  validate_scenario(grid, users);
  return {std::move(grid), std::move(users)};
}

}  // namespace hapdeploy
