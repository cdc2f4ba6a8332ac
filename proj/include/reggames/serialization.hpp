#pragma once

// JSON wire formats.
//
// Game: {"players": N, "actions": [K_1,...,K_N], "payoffs": [[...K values...],...]}
//   with payoffs in row-major joint order (player N varying fastest).
//   Identical-payoff games may instead carry a single array and "shared": true.
// Profile: {"x": [[...],...]} (reduced coordinates) or {"sigma": [[...],...]}.
// Sign pattern: array of rows over {-1,0,1}.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reggames/equilibrium.hpp"
#include "reggames/game.hpp"
#include "reggames/potential.hpp"
#include "reggames/regularity.hpp"
#include "reggames/sign_structure.hpp"

namespace reggames {

using json = nlohmann::json;

inline json game_to_json(const Game& game) {
  json j;
  j["players"] = game.size().players();
  j["actions"] = game.size().actions();
  if (game.identical_payoffs()) {
    j["shared"] = true;
    j["payoffs"] = game.payoffs(0);
  } else {
    json arr = json::array();
    for (int i = 0; i < game.size().players(); ++i) arr.push_back(game.payoffs(i));
    j["payoffs"] = arr;
  }
  return j;
}

inline Game game_from_json(const json& j) {
  if (!j.contains("players") || !j.contains("actions") || !j.contains("payoffs"))
    throw std::invalid_argument("game json: need players, actions, payoffs");
  const int players = j.at("players").get<int>();
  GameSize size(players, j.at("actions").get<std::vector<int>>());
  const json& p = j.at("payoffs");
  const bool shared = j.value("shared", false);
  if (shared || (!p.empty() && p.at(0).is_number())) {
    auto u = p.get<std::vector<double>>();
    return Game::identical(size, std::move(u));
  }
  auto payoffs = p.get<std::vector<std::vector<double>>>();
  return Game(size, std::move(payoffs));
}

inline json profile_to_json(const Profile& x) {
  json j;
  json xs = json::array(), sig = json::array();
  for (int i = 0; i < x.players(); ++i) {
    xs.push_back(x.reduced(i).coords());
    sig.push_back(x.simplex(i).weights());
  }
  j["x"] = xs;
  j["sigma"] = sig;
  return j;
}

inline Profile profile_from_json(const json& j) {
  if (j.contains("x")) {
    std::vector<ReducedStrategy> xs;
    for (const auto& row : j.at("x")) xs.emplace_back(row.get<std::vector<double>>());
    return Profile(std::move(xs));
  }
  if (j.contains("sigma")) {
    std::vector<SimplexStrategy> sig;
    for (const auto& row : j.at("sigma")) sig.emplace_back(row.get<std::vector<double>>());
    return Profile::from_simplex(sig);
  }
  throw std::invalid_argument("profile json: need x or sigma");
}

inline json carrier_to_json(const Carrier& c) {
  json j = json::array();
  for (int i = 0; i < c.players(); ++i) j.push_back(c.support(i));
  return j;
}

inline json decomposition_to_json(const PotentialDecomposition& d) {
  json j;
  j["potential"] = d.potential;
  j["weights"] = d.weights;
  j["dummies"] = d.dummies;
  j["kind"] = d.kind == PotentialKind::identical ? "identical"
              : d.kind == PotentialKind::exact   ? "exact"
                                                 : "weighted";
  j["mean_zero"] = d.mean_zero;
  return j;
}

inline json record_to_json(const EquilibriumRecord& r) {
  json j = profile_to_json(r.profile);
  j["carrier"] = carrier_to_json(r.carrier);
  j["max_regret"] = r.max_regret;
  j["isolated"] = r.isolated;
  return j;
}

// infinities and NaN are not representable in JSON numbers
inline json finite_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json certificate_to_json(const RegularityCertificate& c) {
  json j;
  j["verdict"] = to_string(c.verdict);
  j["carrier"] = carrier_to_json(c.carrier);
  j["extended_carrier"] = carrier_to_json(c.extended_carrier);
  json w = json::array();
  for (const auto& g : c.gradient_witnesses)
    w.push_back({{"player", g.player}, {"action", g.action}, {"gradient", g.gradient}});
  j["gradient_witnesses"] = w;
  j["hessian_min_singular"] = finite_or_string(c.hessian_min_singular);
  j["x_jacobian_min_singular"] = finite_or_string(c.x_jacobian_min_singular);
  j["delta_jacobian_min_singular"] = finite_or_string(c.delta_jacobian_min_singular);
  j["reference_actions"] = c.reference_actions;
  j["max_regret"] = c.max_regret;
  j["tolerance"] = c.tolerance;
  j["singular_threshold"] = c.singular_threshold;
  j["borderline"] = c.borderline;
  j["potential_based"] = c.potential_based;
  return j;
}

inline json sign_pattern_to_json(const SignPatternMatrix& m) {
  json j = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(static_cast<int>(m.at(r, c)));
    j.push_back(row);
  }
  return j;
}

inline SignPatternMatrix sign_pattern_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.at(0).is_array())
    throw std::invalid_argument("sign pattern json: need an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  SignPatternMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j.at(r).size()) != cols)
      throw std::invalid_argument("sign pattern json: ragged rows");
    for (int c = 0; c < cols; ++c) m.set(r, c, j.at(r).at(c).get<int>());
  }
  return m;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace reggames
