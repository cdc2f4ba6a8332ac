#pragma once

// Nash equilibrium enumeration for desk-scale games. Two-player games get
// full support enumeration; identical-payoff games of any player count get
// carrier-by-carrier critical-point solves (linear when at most one player
// mixes or N = 2, damped Newton otherwise; best-effort for N >= 3).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "reggames/game.hpp"
#include "reggames/linalg.hpp"
#include "reggames/rng.hpp"

namespace reggames {

struct EquilibriumRecord {
  Profile profile;
  Carrier carrier;
  double max_regret = 0.0;
  bool isolated = true;  // false when the solver detected a solution manifold
};

// Largest unilateral improvement over the profile's own value; <= 0 at Nash
// equilibria. The current action of a (numerically) pure player is excluded
// from its own deviation set so that strict pure equilibria report strictly
// negative regret.
inline double verify_equilibrium(const Game& game, const Profile& x,
                                 double carrier_tol = kCarrierTol) {
  if (!x.matches(game.size()))
    throw std::invalid_argument("verify_equilibrium: profile does not match game size");
  double regret = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < game.size().players(); ++i) {
    const double own = expected_utility(game, x, i);
    const SimplexStrategy sigma = x.simplex(i);
    for (int a = 0; a < game.size().actions(i); ++a) {
      if (sigma.weight(a) >= 1.0 - carrier_tol) continue;  // the pure action itself
      regret = std::max(regret, unilateral_value(game, i, a, x) - own);
    }
  }
  return regret;
}

struct EnumStats {
  int filtered_critical_points = 0;  // face solutions rejected by the BR filter
  int newton_failures = 0;           // non-converged Newton starts
};

namespace detail {

struct SupportPairSolution {
  Profile profile;
  bool isolated;
};

// Solves the two indifference systems of a 2-player support pair: player 1's
// mixture makes player 2 indifferent across s2, and vice versa. Candidates
// with negative weights (beyond tol) or an inconsistent system are rejected;
// rank-deficient systems yield the minimum-norm point and are flagged
// non-isolated.
inline std::optional<SupportPairSolution> solve_support_pair(const Game& game,
                                                             const std::vector<int>& s1,
                                                             const std::vector<int>& s2,
                                                             double tol) {
  const GameSize& size = game.size();
  const double scale = std::max(1.0, game.max_abs_payoff());
  bool isolated = true;

  auto solve_side = [&](int mover, int judge, const std::vector<int>& own,
                        const std::vector<int>& judged) -> std::optional<std::vector<double>> {
    const int n = static_cast<int>(own.size());
    Mat m(static_cast<int>(judged.size()), n);
    std::vector<double> rhs(judged.size(), 0.0);
    for (int c = 0; c < n; ++c) m(0, c) = 1.0;
    rhs[0] = 1.0;
    for (size_t t = 1; t < judged.size(); ++t) {
      for (int c = 0; c < n; ++c) {
        std::vector<int> joint(2);
        joint[mover] = own[c];
        joint[judge] = judged[t];
        const double hi = game.payoff(judge, size.joint_index(joint));
        joint[judge] = judged[0];
        const double lo = game.payoff(judge, size.joint_index(joint));
        m(static_cast<int>(t), c) = hi - lo;
      }
    }
    const LstsqResult sol = solve_least_squares(m, rhs, kSingularTolRel);
    if (sol.residual > 1e-7 * scale) return std::nullopt;
    if (sol.rank < n) isolated = false;
    std::vector<double> weights(size.actions(mover), 0.0);
    for (int c = 0; c < n; ++c) {
      if (sol.x[c] < -tol) return std::nullopt;
      weights[own[c]] = std::max(0.0, sol.x[c]);
    }
    return weights;
  };

  auto w1 = solve_side(0, 1, s1, s2);
  if (!w1) return std::nullopt;
  auto w2 = solve_side(1, 0, s2, s1);
  if (!w2) return std::nullopt;
  std::vector<SimplexStrategy> sigmas;
  sigmas.emplace_back(std::move(*w1));
  sigmas.emplace_back(std::move(*w2));
  return SupportPairSolution{Profile::from_simplex(sigmas), isolated};
}

inline std::vector<std::vector<int>> subsets_of_actions(int count) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << count); ++mask) {
    std::vector<int> s;
    for (int a = 0; a < count; ++a)
      if (mask & (1 << a)) s.push_back(a);
    out.push_back(std::move(s));
  }
  return out;
}

inline bool flat_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

// L-infinity clustering in X-space; each cluster is replaced by its centroid,
// re-verified against the game. A cluster is isolated only if every member
// was.
inline std::vector<EquilibriumRecord> dedup(std::vector<EquilibriumRecord> records,
                                            const Game& game, double radius = 1e-6) {
  if (radius <= 0.0) throw std::invalid_argument("dedup: radius must be positive");
  const int n = static_cast<int>(records.size());
  if (n <= 1) return records;
  std::vector<std::vector<double>> flats;
  flats.reserve(n);
  for (const auto& r : records) flats.push_back(r.profile.flat());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d = 0.0;
      for (size_t k = 0; k < flats[i].size(); ++k)
        d = std::max(d, std::fabs(flats[i][k] - flats[j][k]));
      if (d <= radius) parent[find(j)] = find(i);
    }
  }
  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i) clusters[find(i)].push_back(i);
  std::vector<EquilibriumRecord> out;
  for (int root = 0; root < n; ++root) {
    const auto& members = clusters[root];
    if (members.empty()) continue;
    std::vector<double> centroid(flats[root].size(), 0.0);
    bool isolated = true;
    for (int m : members) {
      for (size_t k = 0; k < centroid.size(); ++k) centroid[k] += flats[m][k];
      isolated = isolated && records[m].isolated;
    }
    for (double& c : centroid) c /= static_cast<double>(members.size());
    std::vector<ReducedStrategy> xs;
    size_t pos = 0;
    for (int i = 0; i < records[root].profile.players(); ++i) {
      const int d = records[root].profile.reduced(i).dim();
      xs.emplace_back(std::vector<double>(centroid.begin() + pos, centroid.begin() + pos + d));
      pos += d;
    }
    Profile rep(std::move(xs));
    EquilibriumRecord rec{rep, carrier_of(rep), verify_equilibrium(game, rep), isolated};
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const EquilibriumRecord& a, const EquilibriumRecord& b) {
    return detail::flat_less(a.profile.flat(), b.profile.flat());
  });
  return out;
}

// Support enumeration for 2-player games. Complete for nondegenerate games;
// rank-deficient supports are kept as minimum-norm representatives flagged
// non-isolated.
inline std::vector<EquilibriumRecord> enumerate_2p(const Game& game,
                                                   double tol = kIndifferenceTol) {
  if (game.size().players() != 2) throw std::invalid_argument("enumerate_2p: needs 2 players");
  const auto subs1 = detail::subsets_of_actions(game.size().actions(0));
  const auto subs2 = detail::subsets_of_actions(game.size().actions(1));
  std::vector<EquilibriumRecord> found;
  for (const auto& s1 : subs1) {
    for (const auto& s2 : subs2) {
      auto sol = detail::solve_support_pair(game, s1, s2, tol);
      if (!sol) continue;
      const double regret = verify_equilibrium(game, sol->profile);
      if (regret > tol) continue;
      found.push_back(
          EquilibriumRecord{sol->profile, carrier_of(sol->profile), regret, sol->isolated});
    }
  }
  return dedup(std::move(found), game, 1e-6);
}

namespace detail {

// Face-restricted profile: mixed players get the listed carrier weights (the
// reference carrier action absorbs the slack), everyone else is pure.
inline Profile face_profile(const GameSize& size, const Carrier& carrier,
                            const std::vector<double>& free_coords) {
  std::vector<SimplexStrategy> sigmas;
  size_t pos = 0;
  for (int i = 0; i < size.players(); ++i) {
    std::vector<double> w(size.actions(i), 0.0);
    const auto& sup = carrier.support(i);
    double rest = 0.0;
    for (size_t k = 1; k < sup.size(); ++k) {
      w[sup[k]] = free_coords[pos];
      rest += free_coords[pos];
      ++pos;
    }
    w[sup[0]] = 1.0 - rest;
    sigmas.emplace_back(std::move(w));
  }
  return Profile::from_simplex(sigmas);
}

inline std::vector<double> face_residual(const GameSize& size, const std::vector<double>& u,
                                         const Carrier& carrier, const Profile& x) {
  std::vector<SimplexStrategy> sigma = x.simplexes();
  std::vector<double> f;
  f.reserve(carrier.free_dim());
  for (int i = 0; i < size.players(); ++i) {
    const auto& sup = carrier.support(i);
    if (sup.size() < 2) continue;
    const double base = pinned_value(size, u, sigma, {{i, sup[0]}});
    for (size_t k = 1; k < sup.size(); ++k)
      f.push_back(pinned_value(size, u, sigma, {{i, static_cast<int>(sup[k])}}) - base);
  }
  return f;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// project candidate free coordinates back into the closed face
inline void clamp_to_face(const GameSize& size, const Carrier& carrier, std::vector<double>& s) {
  size_t pos = 0;
  for (int i = 0; i < size.players(); ++i) {
    const int d = carrier.support_size(i) - 1;
    double sum = 0.0;
    for (int k = 0; k < d; ++k) {
      s[pos + k] = std::max(0.0, s[pos + k]);
      sum += s[pos + k];
    }
    if (sum > 1.0)
      for (int k = 0; k < d; ++k) s[pos + k] /= sum;
    pos += d;
  }
}

}  // namespace detail

// Critical-point enumeration of the potential on every carrier face, filtered
// by the equilibrium (best-response) condition on the associated
// identical-payoffs game. Complete for N = 2; best-effort for N >= 3, where
// faces with two or more mixing players are solved by multi-start damped
// Newton.
inline std::vector<EquilibriumRecord> enumerate_potential(const GameSize& size,
                                                          const std::vector<double>& potential,
                                                          double tol = kIndifferenceTol,
                                                          int starts = 0,
                                                          EnumStats* stats = nullptr) {
  if (static_cast<int>(potential.size()) != size.joint_count())
    throw std::invalid_argument("enumerate_potential: potential length");
  if (starts < 0) throw std::invalid_argument("enumerate_potential: starts");
  const Game assoc = Game::identical(size, potential);
  const int n = size.players();
  std::vector<std::vector<std::vector<int>>> subs(n);
  for (int i = 0; i < n; ++i) subs[i] = detail::subsets_of_actions(size.actions(i));

  std::vector<EquilibriumRecord> found;
  EnumStats local;
  std::uint64_t carrier_counter = 0;

  std::vector<size_t> odo(n, 0);
  while (true) {
    std::vector<std::vector<int>> supports(n);
    for (int i = 0; i < n; ++i) supports[i] = subs[i][odo[i]];
    const Carrier carrier(supports);
    ++carrier_counter;
    const int gamma = carrier.free_dim();

    auto consider = [&](const Profile& x, bool isolated) {
      const double regret = verify_equilibrium(assoc, x);
      if (regret <= tol) {
        found.push_back(EquilibriumRecord{x, carrier_of(x), regret, isolated});
      } else {
        ++local.filtered_critical_points;
      }
    };

    if (gamma == 0) {
      std::vector<int> pure(n);
      for (int i = 0; i < n; ++i) pure[i] = carrier.support(i).front();
      consider(Profile::pure(size, pure), true);
    } else if (n == 2) {
      auto sol = detail::solve_support_pair(assoc, carrier.support(0), carrier.support(1), tol);
      if (sol) consider(sol->profile, sol->isolated);
    } else if (carrier.mixed_players() == 1) {
      // one mixing player: the critical-point system is constant on the face
      std::vector<double> center(gamma);
      int mixer = -1;
      for (int i = 0; i < n; ++i)
        if (carrier.support_size(i) >= 2) mixer = i;
      for (int k = 0; k < gamma; ++k)
        center[k] = 1.0 / static_cast<double>(carrier.support_size(mixer));
      const Profile x = detail::face_profile(size, carrier, center);
      if (detail::max_abs(detail::face_residual(size, potential, carrier, x)) <= tol)
        consider(x, /*isolated=*/false);
    } else {
      const int tries = starts > 0 ? starts : 20 * gamma;
      for (int attempt = 0; attempt < tries; ++attempt) {
        Rng rng(derive_stream_seed(0x5EEDFACEULL + carrier_counter, attempt));
        std::vector<double> s(gamma);
        {
          size_t pos = 0;
          for (int i = 0; i < n; ++i) {
            const int d = carrier.support_size(i) - 1;
            if (d == 0) continue;
            // interior point of the sub-simplex via normalized exponentials
            std::vector<double> e(d + 1);
            double total = 0.0;
            for (double& v : e) {
              v = -std::log(1.0 - rng.uniform01());
              total += v;
            }
            for (int k = 0; k < d; ++k) s[pos + k] = e[k] / total;
            pos += d;
          }
        }
        bool converged = false;
        Profile x = detail::face_profile(size, carrier, s);
        std::vector<double> f = detail::face_residual(size, potential, carrier, x);
        for (int iter = 0; iter < 100; ++iter) {
          if (detail::max_abs(f) < 1e-10) {
            converged = true;
            break;
          }
          const Mat jac = restricted_hessian(size, potential, x, carrier);
          std::vector<double> neg_f(f.size());
          for (size_t k = 0; k < f.size(); ++k) neg_f[k] = -f[k];
          const LstsqResult step = solve_least_squares(jac, neg_f, kSingularTolRel);
          double t = 1.0;
          bool improved = false;
          for (int half = 0; half < 24; ++half) {
            std::vector<double> trial = s;
            for (int k = 0; k < gamma; ++k) trial[k] += t * step.x[k];
            detail::clamp_to_face(size, carrier, trial);
            Profile xt = detail::face_profile(size, carrier, trial);
            std::vector<double> ft = detail::face_residual(size, potential, carrier, xt);
            if (detail::max_abs(ft) < detail::max_abs(f)) {
              s = std::move(trial);
              x = std::move(xt);
              f = std::move(ft);
              improved = true;
              break;
            }
            t *= 0.5;
          }
          if (!improved) break;
        }
        if (detail::max_abs(f) < 1e-10) converged = true;
        if (!converged) {
          ++local.newton_failures;
          continue;
        }
        const Mat jac = restricted_hessian(size, potential, x, carrier);
        consider(x, min_singular_ratio(jac) > kSingularTolRel);
      }
    }

    int lane = n - 1;
    while (lane >= 0) {
      if (++odo[lane] < subs[lane].size()) break;
      odo[lane] = 0;
      --lane;
    }
    if (lane < 0) break;
  }
  if (stats) *stats = local;
  return dedup(std::move(found), assoc, 1e-6);
}

}  // namespace reggames
