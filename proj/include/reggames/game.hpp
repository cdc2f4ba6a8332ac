#pragma once

// Finite normal-form games: strategy spaces, the bijection between the
// probability simplex and its reduced coordinates, expected utilities,
// restricted gradients/Hessians on carrier faces, and best responses.
//
// Conventions used throughout:
//   - A joint pure strategy is a tuple (y_1,...,y_N) of 0-based action
//     indices. Its flat index is row-major with player N varying fastest.
//   - Reduced coordinates x_i drop the first simplex weight:
//     sigma_i = (1 - sum(x_i), x_i[0], ..., x_i[K_i-2]).
//   - All types are immutable after construction; all operations are pure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reggames/linalg.hpp"

namespace reggames {

constexpr double kCarrierTol = 1e-9;       // default support threshold
constexpr double kIndifferenceTol = 1e-8;  // default best-response tie tolerance
constexpr double kSingularTolRel = 1e-8;   // sigma_min / sigma_max rank threshold

class GameSize {
 public:
  GameSize(int players, std::vector<int> actions)
      : players_(players), actions_(std::move(actions)) {
    if (players_ < 2) throw std::invalid_argument("GameSize: need at least 2 players");
    if (static_cast<int>(actions_.size()) != players_)
      throw std::invalid_argument("GameSize: actions list length must equal player count");
    long long k = 1;
    for (int a : actions_) {
      if (a < 2) throw std::invalid_argument("GameSize: each player needs at least 2 actions");
      k *= a;
      if (k > (1LL << 30)) throw std::invalid_argument("GameSize: joint strategy space too large");
    }
    joint_count_ = static_cast<int>(k);
    strides_.assign(players_, 1);
    for (int i = players_ - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * actions_[i + 1];
  }

  int players() const { return players_; }
  int actions(int player) const { return actions_[player]; }
  const std::vector<int>& actions() const { return actions_; }
  int joint_count() const { return joint_count_; }
  int stride(int player) const { return strides_[player]; }

  int joint_index(const std::vector<int>& pure) const {
    int idx = 0;
    for (int i = 0; i < players_; ++i) idx += pure[i] * strides_[i];
    return idx;
  }

  std::vector<int> joint_action(int index) const {
    std::vector<int> pure(players_);
    for (int i = 0; i < players_; ++i) pure[i] = (index / strides_[i]) % actions_[i];
    return pure;
  }

  int action_of(int joint_index, int player) const {
    return (joint_index / strides_[player]) % actions_[player];
  }

  bool operator==(const GameSize& o) const {
    return players_ == o.players_ && actions_ == o.actions_;
  }

 private:
  int players_;
  std::vector<int> actions_;
  int joint_count_;
  std::vector<int> strides_;
};

class Game {
 public:
  Game(GameSize size, std::vector<std::vector<double>> payoffs)
      : size_(std::move(size)), payoffs_(std::move(payoffs)) {
    if (static_cast<int>(payoffs_.size()) != size_.players())
      throw std::invalid_argument("Game: one payoff array per player required");
    for (const auto& u : payoffs_) {
      if (static_cast<int>(u.size()) != size_.joint_count())
        throw std::invalid_argument("Game: payoff array length must equal joint count");
      for (double v : u)
        if (!std::isfinite(v)) throw std::invalid_argument("Game: payoffs must be finite");
    }
  }

  static Game identical(const GameSize& size, std::vector<double> shared) {
    std::vector<std::vector<double>> all(size.players(), shared);
    return Game(size, std::move(all));
  }

  const GameSize& size() const { return size_; }
  double payoff(int player, int joint_index) const { return payoffs_[player][joint_index]; }
  const std::vector<double>& payoffs(int player) const { return payoffs_[player]; }

  bool identical_payoffs() const {
    for (int i = 1; i < size_.players(); ++i)
      if (payoffs_[i] != payoffs_[0]) return false;
    return true;
  }

  double max_abs_payoff() const {
    double m = 0.0;
    for (const auto& u : payoffs_)
      for (double v : u) m = std::max(m, std::fabs(v));
    return m;
  }

 private:
  GameSize size_;
  std::vector<std::vector<double>> payoffs_;
};

class SimplexStrategy {
 public:
  explicit SimplexStrategy(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("SimplexStrategy: empty weight vector");
    double sum = 0.0;
    for (double& w : weights_) {
      if (!std::isfinite(w) || w < -kCarrierTol)
        throw std::invalid_argument("SimplexStrategy: negative weight");
      if (w < 0.0) w = 0.0;
      sum += w;
    }
    if (sum <= 0.0) throw std::invalid_argument("SimplexStrategy: weights sum to zero");
    if (std::fabs(sum - 1.0) > 1e-12)
      for (double& w : weights_) w /= sum;
  }

  int actions() const { return static_cast<int>(weights_.size()); }
  double weight(int action) const { return weights_[action]; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

class ReducedStrategy {
 public:
  explicit ReducedStrategy(std::vector<double> coords) : coords_(std::move(coords)) {
    double sum = 0.0;
    for (double& c : coords_) {
      if (!std::isfinite(c) || c < -kCarrierTol || c > 1.0 + kCarrierTol)
        throw std::invalid_argument("ReducedStrategy: coordinate outside [0,1]");
      c = std::min(std::max(c, 0.0), 1.0);
      sum += c;
    }
    if (sum > 1.0 + kCarrierTol)
      throw std::invalid_argument("ReducedStrategy: coordinates sum past 1");
    if (sum > 1.0)
      for (double& c : coords_) c /= sum;
  }

  int dim() const { return static_cast<int>(coords_.size()); }
  int actions() const { return dim() + 1; }
  double coord(int k) const { return coords_[k]; }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

inline SimplexStrategy to_simplex(const ReducedStrategy& x) {
  std::vector<double> w(x.actions());
  double sum = 0.0;
  for (int k = 0; k < x.dim(); ++k) {
    w[k + 1] = x.coord(k);
    sum += x.coord(k);
  }
  w[0] = 1.0 - sum;
  return SimplexStrategy(std::move(w));
}

inline ReducedStrategy to_reduced(const SimplexStrategy& sigma) {
  std::vector<double> c(sigma.weights().begin() + 1, sigma.weights().end());
  return ReducedStrategy(std::move(c));
}

class Profile {
 public:
  explicit Profile(std::vector<ReducedStrategy> players) : players_(std::move(players)) {
    if (players_.empty()) throw std::invalid_argument("Profile: empty");
  }

  static Profile from_simplex(const std::vector<SimplexStrategy>& sigmas) {
    std::vector<ReducedStrategy> xs;
    xs.reserve(sigmas.size());
    for (const auto& s : sigmas) xs.push_back(to_reduced(s));
    return Profile(std::move(xs));
  }

  static Profile pure(const GameSize& size, const std::vector<int>& actions) {
    std::vector<ReducedStrategy> xs;
    for (int i = 0; i < size.players(); ++i) {
      std::vector<double> c(size.actions(i) - 1, 0.0);
      if (actions[i] < 0 || actions[i] >= size.actions(i))
        throw std::invalid_argument("Profile::pure: action out of range");
      if (actions[i] > 0) c[actions[i] - 1] = 1.0;
      xs.emplace_back(std::move(c));
    }
    return Profile(std::move(xs));
  }

  int players() const { return static_cast<int>(players_.size()); }
  const ReducedStrategy& reduced(int player) const { return players_[player]; }
  SimplexStrategy simplex(int player) const { return to_simplex(players_[player]); }

  std::vector<SimplexStrategy> simplexes() const {
    std::vector<SimplexStrategy> out;
    out.reserve(players_.size());
    for (const auto& x : players_) out.push_back(to_simplex(x));
    return out;
  }

  // concatenated reduced coordinates, in player order
  std::vector<double> flat() const {
    std::vector<double> out;
    for (const auto& x : players_)
      out.insert(out.end(), x.coords().begin(), x.coords().end());
    return out;
  }

  bool matches(const GameSize& size) const {
    if (players() != size.players()) return false;
    for (int i = 0; i < players(); ++i)
      if (players_[i].actions() != size.actions(i)) return false;
    return true;
  }

 private:
  std::vector<ReducedStrategy> players_;
};

class Carrier {
 public:
  Carrier() = default;  // empty placeholder; populated carriers come from the ctor below

  explicit Carrier(std::vector<std::vector<int>> supports) : supports_(std::move(supports)) {
    for (auto& s : supports_) {
      if (s.empty()) throw std::invalid_argument("Carrier: empty support");
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      if (s.front() < 0) throw std::invalid_argument("Carrier: negative action index");
    }
  }

  int players() const { return static_cast<int>(supports_.size()); }
  const std::vector<int>& support(int player) const { return supports_[player]; }
  const std::vector<std::vector<int>>& supports() const { return supports_; }
  int support_size(int player) const { return static_cast<int>(supports_[player].size()); }

  // gamma = sum_i (gamma_i - 1), the number of free face coordinates
  int free_dim() const {
    int g = 0;
    for (const auto& s : supports_) g += static_cast<int>(s.size()) - 1;
    return g;
  }

  // number of players with at least two supported actions
  int mixed_players() const {
    int n = 0;
    for (const auto& s : supports_)
      if (s.size() >= 2) ++n;
    return n;
  }

  // K~ = prod_i gamma_i, the number of all-carrier action combinations
  int combo_count() const {
    long long k = 1;
    for (const auto& s : supports_) k *= static_cast<long long>(s.size());
    return static_cast<int>(k);
  }

  bool contains(const Carrier& other) const {
    if (other.players() != players()) return false;
    for (int i = 0; i < players(); ++i)
      if (!std::includes(supports_[i].begin(), supports_[i].end(), other.supports_[i].begin(),
                         other.supports_[i].end()))
        return false;
    return true;
  }

  bool operator==(const Carrier& o) const { return supports_ == o.supports_; }

 private:
  std::vector<std::vector<int>> supports_;
};

inline Carrier carrier_of(const Profile& x, double tol = kCarrierTol) {
  if (tol < 0.0) throw std::invalid_argument("carrier_of: negative tolerance");
  std::vector<std::vector<int>> supports(x.players());
  for (int i = 0; i < x.players(); ++i) {
    SimplexStrategy s = x.simplex(i);
    for (int a = 0; a < s.actions(); ++a)
      if (s.weight(a) > tol) supports[i].push_back(a);
    if (supports[i].empty()) throw std::invalid_argument("carrier_of: vanishing strategy");
  }
  return Carrier(std::move(supports));
}

namespace detail {

// Expected value of one coefficient vector over Y, with the players listed in
// `pin_player` fixed at pure actions and everyone else mixed per `sigma`.
inline double pinned_value(const GameSize& size, const std::vector<double>& coeffs,
                           const std::vector<SimplexStrategy>& sigma, const int* pin_player,
                           const int* pin_action, int pin_count) {
  const int n = size.players();
  double total = 0.0;
  for (int tau = 0; tau < size.joint_count(); ++tau) {
    const double c = coeffs[tau];
    if (c == 0.0) continue;
    double w = 1.0;
    for (int i = 0; i < n && w != 0.0; ++i) {
      const int a = size.action_of(tau, i);
      bool pinned = false;
      for (int p = 0; p < pin_count; ++p) {
        if (pin_player[p] == i) {
          pinned = true;
          if (pin_action[p] != a) w = 0.0;
          break;
        }
      }
      if (!pinned) w *= sigma[i].weight(a);
    }
    total += c * w;
  }
  return total;
}

inline double pinned_value(const GameSize& size, const std::vector<double>& coeffs,
                           const std::vector<SimplexStrategy>& sigma,
                           std::initializer_list<std::pair<int, int>> pins) {
  int players[4], actions[4];
  int n = 0;
  for (const auto& [p, a] : pins) {
    players[n] = p;
    actions[n] = a;
    ++n;
  }
  return pinned_value(size, coeffs, sigma, players, actions, n);
}

}  // namespace detail

inline double expected_utility(const Game& game, const Profile& profile, int player) {
  if (player < 0 || player >= game.size().players())
    throw std::out_of_range("expected_utility: player index");
  if (!profile.matches(game.size()))
    throw std::invalid_argument("expected_utility: profile does not match game size");
  return detail::pinned_value(game.size(), game.payoffs(player), profile.simplexes(), {});
}

// Expected utility of `player` when pinned to `action`, opponents mixed per
// `others` (the pinned player's own entry in `others` is ignored).
inline double unilateral_value(const Game& game, int player, int action, const Profile& others) {
  const GameSize& size = game.size();
  if (player < 0 || player >= size.players()) throw std::out_of_range("unilateral_value: player");
  if (action < 0 || action >= size.actions(player))
    throw std::out_of_range("unilateral_value: action");
  return detail::pinned_value(size, game.payoffs(player), others.simplexes(), {{player, action}});
}

// Reordering of one player's actions that places `ref_action` first and keeps
// the rest in ascending index order.
inline std::vector<int> ref_first_order(int actions, int ref_action) {
  if (ref_action < 0 || ref_action >= actions)
    throw std::out_of_range("reference action out of range");
  std::vector<int> order;
  order.reserve(actions);
  order.push_back(ref_action);
  for (int a = 0; a < actions; ++a)
    if (a != ref_action) order.push_back(a);
  return order;
}

// Gradient of the potential's multilinear extension in the reduced coordinates
// obtained by placing ref_action first: component k is
// U(a_{k+1}, x_{-i}) - U(ref, x_{-i}).
inline std::vector<double> restricted_gradient(const GameSize& size,
                                               const std::vector<double>& potential,
                                               const Profile& x, int player, int ref_action) {
  if (static_cast<int>(potential.size()) != size.joint_count())
    throw std::invalid_argument("restricted_gradient: potential length");
  const std::vector<int> order = ref_first_order(size.actions(player), ref_action);
  std::vector<SimplexStrategy> sigma = x.simplexes();
  const double base = detail::pinned_value(size, potential, sigma, {{player, ref_action}});
  std::vector<double> grad(size.actions(player) - 1);
  for (int k = 0; k + 1 < size.actions(player); ++k)
    grad[k] = detail::pinned_value(size, potential, sigma, {{player, order[k + 1]}}) - base;
  return grad;
}

// The carrier action carrying the most weight, ties broken by lowest index.
inline int max_weight_action(const SimplexStrategy& sigma, const std::vector<int>& support) {
  int best = support.front();
  for (int a : support)
    if (sigma.weight(a) > sigma.weight(best)) best = a;
  return best;
}

inline std::vector<int> default_reference_actions(const Profile& x, const Carrier& carrier) {
  std::vector<int> refs(x.players());
  for (int i = 0; i < x.players(); ++i)
    refs[i] = max_weight_action(x.simplex(i), carrier.support(i));
  return refs;
}

// Per-player carrier ordering: reference action first, remaining carrier
// actions ascending. The free face coordinates are slots 1..gamma_i-1.
inline std::vector<std::vector<int>> carrier_orders(const Carrier& carrier,
                                                    const std::vector<int>& refs) {
  std::vector<std::vector<int>> orders(carrier.players());
  for (int i = 0; i < carrier.players(); ++i) {
    const auto& sup = carrier.support(i);
    if (std::find(sup.begin(), sup.end(), refs[i]) == sup.end())
      throw std::invalid_argument("reference action outside carrier");
    orders[i].push_back(refs[i]);
    for (int a : sup)
      if (a != refs[i]) orders[i].push_back(a);
  }
  return orders;
}

// Hessian of the potential restricted to the face of `carrier`: side gamma,
// rows/columns indexed by (mixed player, free carrier slot). Off-diagonal
// blocks are four-point payoff differences; own-player blocks are zero by
// multilinearity.
inline Mat restricted_hessian(const GameSize& size, const std::vector<double>& potential,
                              const Profile& x, const Carrier& carrier) {
  if (static_cast<int>(potential.size()) != size.joint_count())
    throw std::invalid_argument("restricted_hessian: potential length");
  if (carrier.mixed_players() == 0) throw std::invalid_argument("empty Hessian");
  const std::vector<int> refs = default_reference_actions(x, carrier);
  const std::vector<std::vector<int>> orders = carrier_orders(carrier, refs);
  std::vector<SimplexStrategy> sigma = x.simplexes();

  struct RowId {
    int player;
    int slot;  // 1..gamma_i-1 in the carrier ordering
  };
  std::vector<RowId> rows;
  for (int i = 0; i < size.players(); ++i)
    for (int k = 1; k < carrier.support_size(i); ++k) rows.push_back({i, k});

  const int gamma = carrier.free_dim();
  Mat h(gamma, gamma);
  for (int r = 0; r < gamma; ++r) {
    for (int c = r + 1; c < gamma; ++c) {
      const auto [i, k] = rows[r];
      const auto [j, l] = rows[c];
      if (i == j) continue;  // multilinearity: no own-player curvature
      const int ai = orders[i][k], ri = orders[i][0];
      const int aj = orders[j][l], rj = orders[j][0];
      const double v =
          detail::pinned_value(size, potential, sigma, {{i, ai}, {j, aj}}) -
          detail::pinned_value(size, potential, sigma, {{i, ai}, {j, rj}}) -
          detail::pinned_value(size, potential, sigma, {{i, ri}, {j, aj}}) +
          detail::pinned_value(size, potential, sigma, {{i, ri}, {j, rj}});
      h(r, c) = v;
      h(c, r) = v;
    }
  }
  return h;
}

struct BestResponseSet {
  std::vector<int> actions;  // ascending
  double value = 0.0;        // the maximum unilateral value
};

inline BestResponseSet best_response_pure_set(const Game& game, int player, const Profile& others,
                                              double tol = kIndifferenceTol) {
  if (tol < 0.0) throw std::invalid_argument("best_response_pure_set: negative tolerance");
  const int actions = game.size().actions(player);
  std::vector<double> values(actions);
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < actions; ++a) {
    values[a] = unilateral_value(game, player, a, others);
    best = std::max(best, values[a]);
  }
  BestResponseSet out;
  out.value = best;
  for (int a = 0; a < actions; ++a)
    if (values[a] >= best - tol) out.actions.push_back(a);
  return out;
}

}  // namespace reggames
