#pragma once

// Shared test-side oracles, kept independent of the library's evaluation
// paths: joint payoffs are summed by explicit odometer iteration over action
// tuples, and derivatives come from finite differences of that sum.

#include <cmath>
#include <vector>

#include "reggames/game.hpp"
#include "reggames/rng.hpp"

namespace testutil {

// Expected value of `coeffs` under per-player weight vectors, by direct
// enumeration of all joint action tuples.
inline double oracle_value(const reggames::GameSize& size, const std::vector<double>& coeffs,
                           const std::vector<std::vector<double>>& weights) {
  const int n = size.players();
  std::vector<int> tuple(n, 0);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= weights[i][tuple[i]];
    total += coeffs[size.joint_index(tuple)] * w;
    int lane = n - 1;
    while (lane >= 0) {
      if (++tuple[lane] < size.actions(lane)) break;
      tuple[lane] = 0;
      --lane;
    }
    if (lane < 0) break;
  }
  return total;
}

inline std::vector<std::vector<double>> weights_of(const reggames::Profile& x) {
  std::vector<std::vector<double>> w;
  for (int i = 0; i < x.players(); ++i) w.push_back(x.simplex(i).weights());
  return w;
}

// random interior profile with every weight at least `margin`
inline reggames::Profile random_interior_profile(reggames::Rng& rng, const reggames::GameSize& size,
                                                 double margin = 0.05) {
  std::vector<reggames::SimplexStrategy> sigmas;
  for (int i = 0; i < size.players(); ++i) {
    std::vector<double> w(size.actions(i));
    double total = 0.0;
    for (double& v : w) {
      v = margin + rng.uniform01();
      total += v;
    }
    for (double& v : w) v /= total;
    sigmas.emplace_back(std::move(w));
  }
  return reggames::Profile::from_simplex(sigmas);
}

inline std::vector<double> random_vector(reggames::Rng& rng, int len) {
  std::vector<double> v(len);
  for (double& x : v) x = rng.normal();
  return v;
}

// Perturbs sigma in the reduced-coordinate direction of (player, action):
// weight of `action` moves by delta, the reference action absorbs -delta.
inline std::vector<std::vector<double>> nudge(const std::vector<std::vector<double>>& weights,
                                              int player, int action, int ref, double delta) {
  std::vector<std::vector<double>> out = weights;
  out[player][action] += delta;
  out[player][ref] -= delta;
  return out;
}

}  // namespace testutil
