#pragma once

// Potential structure of games: detection of identical-payoff / exact /
// weighted potential form, recovery of potential functions and weights,
// construction of the associated identical-payoffs game, and seeded samplers
// for each class.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "reggames/game.hpp"
#include "reggames/linalg.hpp"
#include "reggames/rng.hpp"

namespace reggames {

enum class PotentialKind { identical, exact, weighted };

struct PotentialDecomposition {
  std::vector<double> potential;             // over Y, length K
  std::vector<double> weights;               // per player, all > 0
  std::vector<std::vector<double>> dummies;  // dummies[i] over Y_{-i}
  PotentialKind kind = PotentialKind::exact;
  bool mean_zero = false;
};

// Flat index over Y_{-i}: row-major over the remaining players in order,
// later players varying fastest.
inline int opponent_joint_count(const GameSize& size, int player) {
  return size.joint_count() / size.actions(player);
}

inline int opponent_index(const GameSize& size, int player, int joint_index) {
  int idx = 0;
  for (int j = 0; j < size.players(); ++j) {
    if (j == player) continue;
    idx = idx * size.actions(j) + size.action_of(joint_index, j);
  }
  return idx;
}

// Potential recovered by path-summing unilateral deviations from the first
// joint action, anchored at u(y_ref) = 0. Absent when some deviation cycle
// fails to close within tol (relative to the game's payoff scale).
inline std::optional<std::vector<double>> exact_potential_of(const Game& game,
                                                             double tol = 1e-8) {
  if (tol < 0.0) throw std::invalid_argument("exact_potential_of: negative tolerance");
  const GameSize& size = game.size();
  const int n = size.players();
  const int K = size.joint_count();
  std::vector<double> u(K, 0.0);
  for (int tau = 0; tau < K; ++tau) {
    const std::vector<int> y = size.joint_action(tau);
    // walk player by player from the all-zero joint action to y
    double acc = 0.0;
    std::vector<int> point(n, 0);
    for (int i = 0; i < n; ++i) {
      std::vector<int> before = point;
      point[i] = y[i];
      acc += game.payoff(i, size.joint_index(point)) - game.payoff(i, size.joint_index(before));
    }
    u[tau] = acc;
  }
  // consistency: every unilateral deviation of every player must match u
  const double bound = tol * std::max(1.0, game.max_abs_payoff());
  for (int i = 0; i < n; ++i) {
    for (int tau = 0; tau < K; ++tau) {
      const int a = size.action_of(tau, i);
      if (a == 0) continue;
      const int base = tau - a * size.stride(i);
      const double dv = game.payoff(i, tau) - game.payoff(i, base);
      const double du = u[tau] - u[base];
      if (std::fabs(dv - du) > bound) return std::nullopt;
    }
  }
  return u;
}

namespace detail {

// Rebuilds the per-player dummy component v_i - w_i * u, which must not
// depend on player i's own action; returns nullopt if it does (beyond tol).
inline std::optional<std::vector<std::vector<double>>> extract_dummies(
    const Game& game, const std::vector<double>& u, const std::vector<double>& weights,
    double tol_abs) {
  const GameSize& size = game.size();
  std::vector<std::vector<double>> dummies(size.players());
  for (int i = 0; i < size.players(); ++i) {
    dummies[i].assign(opponent_joint_count(size, i), 0.0);
    std::vector<bool> seen(dummies[i].size(), false);
    for (int tau = 0; tau < size.joint_count(); ++tau) {
      const double d = game.payoff(i, tau) - weights[i] * u[tau];
      const int oi = opponent_index(size, i, tau);
      if (!seen[oi]) {
        dummies[i][oi] = d;
        seen[oi] = true;
      } else if (std::fabs(d - dummies[i][oi]) > tol_abs) {
        return std::nullopt;
      }
    }
  }
  return dummies;
}

}  // namespace detail

// Weighted potential detection: solves the homogeneous system
//   lambda_i * [v_i deviations] = [u deviations]
// in the unknowns (u with u(y_ref)=0, lambda), then looks for a strictly
// positive lambda in the nullspace. Weights are reported as w_i = 1/lambda_i,
// normalized so lambda_1 = 1.
inline std::optional<PotentialDecomposition> weighted_potential_of(const Game& game,
                                                                   double tol = 1e-8) {
  if (tol < 0.0) throw std::invalid_argument("weighted_potential_of: negative tolerance");
  const GameSize& size = game.size();
  const int n = size.players();
  const int K = size.joint_count();
  const int unknowns = (K - 1) + n;  // u[1..K-1] anchored at u[0] = 0, plus lambda
  int rows = 0;
  for (int i = 0; i < n; ++i) rows += (size.actions(i) - 1) * opponent_joint_count(size, i);
  Mat m(rows, unknowns);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    for (int tau = 0; tau < K; ++tau) {
      const int a = size.action_of(tau, i);
      if (a == 0) continue;
      const int base = tau - a * size.stride(i);
      m(r, (K - 1) + i) = game.payoff(i, tau) - game.payoff(i, base);
      if (tau != 0) m(r, tau - 1) -= 1.0;
      if (base != 0) m(r, base - 1) += 1.0;
      ++r;
    }
  }
  const Mat null_basis = nullspace(m, 1e-10);
  if (null_basis.cols() == 0) return std::nullopt;

  // least-squares fit of lambda to all-ones inside the nullspace
  Mat lambda_rows(n, null_basis.cols());
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < null_basis.cols(); ++c) lambda_rows(i, c) = null_basis((K - 1) + i, c);
  const LstsqResult fit = solve_least_squares(lambda_rows, std::vector<double>(n, 1.0));
  std::vector<double> z(unknowns, 0.0);
  for (int c = 0; c < null_basis.cols(); ++c)
    for (int k = 0; k < unknowns; ++k) z[k] += null_basis(k, c) * fit.x[c];

  double lambda_max = 0.0;
  for (int i = 0; i < n; ++i) lambda_max = std::max(lambda_max, std::fabs(z[(K - 1) + i]));
  if (lambda_max == 0.0) return std::nullopt;
  for (int i = 0; i < n; ++i)
    if (z[(K - 1) + i] <= 1e-8 * lambda_max) return std::nullopt;  // not strictly positive

  // normalize lambda_1 = 1
  const double scale = 1.0 / z[K - 1];
  for (double& v : z) v *= scale;

  PotentialDecomposition out;
  out.potential.assign(K, 0.0);
  for (int tau = 1; tau < K; ++tau) out.potential[tau] = z[tau - 1];
  out.weights.assign(n, 1.0);
  bool unit = true;
  for (int i = 0; i < n; ++i) {
    out.weights[i] = 1.0 / z[(K - 1) + i];
    if (std::fabs(out.weights[i] - 1.0) > 1e-9) unit = false;
  }
  out.kind = unit ? PotentialKind::exact : PotentialKind::weighted;

  // final residual guard on all deviations, and dummy extraction
  const double bound = tol * std::max(1.0, game.max_abs_payoff());
  for (int i = 0; i < n; ++i) {
    for (int tau = 0; tau < K; ++tau) {
      const int a = size.action_of(tau, i);
      if (a == 0) continue;
      const int base = tau - a * size.stride(i);
      const double dv = game.payoff(i, tau) - game.payoff(i, base);
      const double du = out.potential[tau] - out.potential[base];
      if (std::fabs(dv - out.weights[i] * du) > bound) return std::nullopt;
    }
  }
  auto dummies = detail::extract_dummies(game, out.potential, out.weights, bound);
  if (!dummies) return std::nullopt;
  out.dummies = std::move(*dummies);
  return out;
}

inline Game associated_identical_game(const std::vector<double>& potential,
                                      const GameSize& size) {
  if (static_cast<int>(potential.size()) != size.joint_count())
    throw std::invalid_argument("associated_identical_game: potential length");
  return Game::identical(size, potential);
}

inline std::vector<double> normalize_mean_zero(std::vector<double> potential) {
  if (potential.empty()) return potential;
  double mean = 0.0;
  for (double v : potential) mean += v;
  mean /= static_cast<double>(potential.size());
  for (double& v : potential) v -= mean;
  return potential;
}

// Shifts the potential to mean zero and folds the shift into the dummies, so
// the decomposition still reconstructs the same game.
inline PotentialDecomposition normalize_mean_zero(PotentialDecomposition dec) {
  double mean = 0.0;
  for (double v : dec.potential) mean += v;
  mean /= static_cast<double>(dec.potential.size());
  for (double& v : dec.potential) v -= mean;
  for (size_t i = 0; i < dec.dummies.size(); ++i)
    for (double& d : dec.dummies[i]) d += dec.weights[i] * mean;
  dec.mean_zero = true;
  return dec;
}

inline Game sample_identical(Rng& rng, const GameSize& size) {
  std::vector<double> u(size.joint_count());
  for (double& v : u) v = rng.normal();
  return Game::identical(size, std::move(u));
}

// Game with payoffs v_i = w_i * u + d_i(y_{-i}), where u and the dummies are
// i.i.d. standard normal. Deviations then satisfy the weighted-potential
// relation exactly.
inline std::pair<Game, PotentialDecomposition> sample_with_weights(
    Rng& rng, const GameSize& size, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != size.players())
    throw std::invalid_argument("sample_with_weights: weight count");
  PotentialDecomposition dec;
  dec.potential.assign(size.joint_count(), 0.0);
  for (double& v : dec.potential) v = rng.normal();
  dec.weights = weights;
  dec.dummies.resize(size.players());
  bool unit = true;
  for (int i = 0; i < size.players(); ++i) {
    dec.dummies[i].assign(opponent_joint_count(size, i), 0.0);
    for (double& v : dec.dummies[i]) v = rng.normal();
    if (weights[i] != 1.0) unit = false;
  }
  dec.kind = unit ? PotentialKind::exact : PotentialKind::weighted;
  std::vector<std::vector<double>> payoffs(size.players());
  for (int i = 0; i < size.players(); ++i) {
    payoffs[i].assign(size.joint_count(), 0.0);
    for (int tau = 0; tau < size.joint_count(); ++tau)
      payoffs[i][tau] =
          weights[i] * dec.potential[tau] + dec.dummies[i][opponent_index(size, i, tau)];
  }
  return {Game(size, std::move(payoffs)), std::move(dec)};
}

// Assembles the game v_i = w_i * u + d_i(y_{-i}) from explicit parts.
inline Game compose_weighted_game(const GameSize& size, const std::vector<double>& potential,
                                  const std::vector<double>& weights,
                                  const std::vector<std::vector<double>>& dummies) {
  if (static_cast<int>(potential.size()) != size.joint_count())
    throw std::invalid_argument("compose_weighted_game: potential length");
  if (static_cast<int>(weights.size()) != size.players() ||
      static_cast<int>(dummies.size()) != size.players())
    throw std::invalid_argument("compose_weighted_game: per-player parts");
  std::vector<std::vector<double>> payoffs(size.players());
  for (int i = 0; i < size.players(); ++i) {
    if (static_cast<int>(dummies[i].size()) != opponent_joint_count(size, i))
      throw std::invalid_argument("compose_weighted_game: dummy length");
    payoffs[i].assign(size.joint_count(), 0.0);
    for (int tau = 0; tau < size.joint_count(); ++tau)
      payoffs[i][tau] = weights[i] * potential[tau] + dummies[i][opponent_index(size, i, tau)];
  }
  return Game(size, std::move(payoffs));
}

inline std::pair<Game, PotentialDecomposition> sample_exact(Rng& rng, const GameSize& size) {
  return sample_with_weights(rng, size, std::vector<double>(size.players(), 1.0));
}

inline std::pair<Game, PotentialDecomposition> sample_weighted(Rng& rng, const GameSize& size) {
  std::vector<double> weights(size.players());
  for (double& w : weights) w = rng.log_uniform(0.1, 10.0);
  return sample_with_weights(rng, size, weights);
}

// The 2x2 identical-payoffs game with matrix [[0,0],[1,-1]] (row player
// indexes rows). Its equilibrium set contains a non-isolated family and a
// first-order degenerate mixed point.
inline Game degenerate_example_game() {
  return Game::identical(GameSize(2, {2, 2}), {0.0, 0.0, 1.0, -1.0});
}

}  // namespace reggames
