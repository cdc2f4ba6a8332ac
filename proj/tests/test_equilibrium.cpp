#include <doctest.h>

#include <cmath>
#include <vector>

#include "reggames/equilibrium.hpp"
#include "reggames/potential.hpp"
#include "reggames/rng.hpp"
#include "test_util.hpp"

using namespace reggames;

namespace {

const GameSize kTwoByTwo(2, {2, 2});

Game coordination() { return Game::identical(kTwoByTwo, {1.0, 0.0, 0.0, 2.0}); }

Profile profile2(std::vector<double> x1, std::vector<double> x2) {
  std::vector<ReducedStrategy> xs;
  xs.emplace_back(std::move(x1));
  xs.emplace_back(std::move(x2));
  return Profile(std::move(xs));
}

// Independent 2x2 oracle. Works in probabilities (p, q) of the SECOND action
// of each player and checks the four pure profiles by direct comparison plus
// the closed-form interior mixed point from the indifference equations.
struct Oracle2x2Point {
  double p, q;
};

std::vector<Oracle2x2Point> oracle_2x2(const Game& g, double tol) {
  auto u = [&](int player, int a, int b) {
    return g.payoff(player, g.size().joint_index({a, b}));
  };
  std::vector<Oracle2x2Point> out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const bool row_ok = u(0, a, b) >= u(0, 1 - a, b) - tol;
      const bool col_ok = u(1, a, b) >= u(1, a, 1 - b) - tol;
      if (row_ok && col_ok) out.push_back({static_cast<double>(a), static_cast<double>(b)});
    }
  // column indifferent: p*(u2(1,0)-u2(1,1)) + (1-p)*(u2(0,0)-u2(0,1)) = 0
  const double c0 = u(1, 0, 0) - u(1, 0, 1);
  const double c1 = u(1, 1, 0) - u(1, 1, 1);
  const double r0 = u(0, 0, 0) - u(0, 1, 0);
  const double r1 = u(0, 0, 1) - u(0, 1, 1);
  if (std::fabs(c1 - c0) > 1e-12 && std::fabs(r1 - r0) > 1e-12) {
    const double p = c0 / (c0 - c1);  // weight on row action 2
    const double q = r0 / (r0 - r1);
    if (p > tol && p < 1.0 - tol && q > tol && q < 1.0 - tol) out.push_back({p, q});
  }
  return out;
}

double regret_2x2(const Game& g, double p, double q) {
  auto u = [&](int player, int a, int b) {
    return g.payoff(player, g.size().joint_index({a, b}));
  };
  const double row_val = (1 - p) * ((1 - q) * u(0, 0, 0) + q * u(0, 0, 1)) +
                         p * ((1 - q) * u(0, 1, 0) + q * u(0, 1, 1));
  const double col_val = (1 - p) * ((1 - q) * u(1, 0, 0) + q * u(1, 0, 1)) +
                         p * ((1 - q) * u(1, 1, 0) + q * u(1, 1, 1));
  double best_row = std::max((1 - q) * u(0, 0, 0) + q * u(0, 0, 1),
                             (1 - q) * u(0, 1, 0) + q * u(0, 1, 1));
  double best_col = std::max((1 - p) * u(1, 0, 0) + p * u(1, 1, 0),
                             (1 - p) * u(1, 0, 1) + p * u(1, 1, 1));
  return std::max(best_row - row_val, best_col - col_val);
}

}  // namespace

TEST_CASE("verify_equilibrium on the coordination game") {
  const Game g = coordination();
  // strict pure equilibrium: strictly negative regret
  CHECK(verify_equilibrium(g, Profile::pure(kTwoByTwo, {1, 1})) == doctest::Approx(-2.0));
  CHECK(verify_equilibrium(g, Profile::pure(kTwoByTwo, {0, 0})) == doctest::Approx(-1.0));
  // mixed equilibrium: regret vanishes
  const Profile mixed = profile2({1.0 / 3.0}, {1.0 / 3.0});
  CHECK(std::fabs(verify_equilibrium(g, mixed)) < 1e-10);
  // non-equilibrium pure profile (a1, c2): the row player gains 2 by moving
  // to a2 (payoff 2 vs 0), the column player 1 by moving to c1
  CHECK(verify_equilibrium(g, Profile::pure(kTwoByTwo, {0, 1})) == doctest::Approx(2.0));
}

TEST_CASE("enumerate_2p finds the three coordination equilibria") {
  const auto recs = enumerate_2p(coordination());
  REQUIRE(recs.size() == 3);
  // lexicographic order in X coordinates: (0,0), (1/3,1/3), (1,1)
  CHECK(recs[0].profile.flat() == std::vector<double>{0.0, 0.0});
  CHECK(recs[1].profile.flat()[0] == doctest::Approx(1.0 / 3.0));
  CHECK(recs[1].profile.flat()[1] == doctest::Approx(1.0 / 3.0));
  CHECK(recs[2].profile.flat() == std::vector<double>{1.0, 1.0});
  for (const auto& r : recs) {
    CHECK(r.max_regret <= kIndifferenceTol);
    CHECK(r.isolated);
  }
  CHECK(recs[0].carrier.free_dim() == 0);
  CHECK(recs[1].carrier.free_dim() == 2);
}

TEST_CASE("a dominant-strategy game has exactly one equilibrium") {
  // v1 rows (1,1)/(0,0): a1 dominant; v2 columns likewise: c1 dominant
  const Game g(kTwoByTwo, {{1.0, 1.0, 0.0, 0.0}, {1.0, 0.0, 1.0, 0.0}});
  const auto recs = enumerate_2p(g);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].profile.flat() == std::vector<double>{0.0, 0.0});
  CHECK(recs[0].max_regret < 0.0);
}

TEST_CASE("the degenerate example yields three records with a non-isolated family") {
  const auto recs = enumerate_2p(degenerate_example_game());
  REQUIRE(recs.size() == 3);
  // sorted: mixed family (0, 1/2), weak pure (0, 1), strict pure (1, 0)
  CHECK(recs[0].profile.flat()[0] == doctest::Approx(0.0));
  CHECK(recs[0].profile.flat()[1] == doctest::Approx(0.5));
  CHECK_FALSE(recs[0].isolated);
  CHECK(recs[1].profile.flat() == std::vector<double>{0.0, 1.0});
  CHECK(std::fabs(recs[1].max_regret) <= kIndifferenceTol);  // weak pure: zero regret
  CHECK(recs[2].profile.flat() == std::vector<double>{1.0, 0.0});
  CHECK(recs[2].max_regret < 0.0);  // strict
}

TEST_CASE("enumerate_2p agrees with the closed-form 2x2 oracle") {
  Rng rng(111);
  int disagreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Game g = sample_identical(rng, kTwoByTwo);
    const auto recs = enumerate_2p(g);
    const auto oracle = oracle_2x2(g, 1e-9);
    if (recs.size() != oracle.size()) {
      ++disagreements;
      continue;
    }
    for (const auto& pt : oracle) {
      bool matched = false;
      for (const auto& r : recs) {
        const auto f = r.profile.flat();
        matched = matched || (std::fabs(f[0] - pt.p) < 1e-6 && std::fabs(f[1] - pt.q) < 1e-6);
      }
      if (!matched) ++disagreements;
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("grid scan: low-regret cells are always near a found equilibrium") {
  Rng rng(113);
  for (int trial = 0; trial < 25; ++trial) {
    const Game g = sample_identical(rng, kTwoByTwo);
    const auto recs = enumerate_2p(g);
    const int n = 60;
    for (int ip = 0; ip <= n; ++ip) {
      for (int iq = 0; iq <= n; ++iq) {
        const double p = static_cast<double>(ip) / n;
        const double q = static_cast<double>(iq) / n;
        if (regret_2x2(g, p, q) > 1e-4) continue;
        double nearest = 1e9;
        for (const auto& r : recs) {
          const auto f = r.profile.flat();
          nearest = std::min(nearest, std::max(std::fabs(f[0] - p), std::fabs(f[1] - q)));
        }
        CHECK(nearest < 0.15);
      }
    }
  }
}

TEST_CASE("enumerate_potential agrees with enumerate_2p on identical-payoff games") {
  Rng rng(127);
  for (int trial = 0; trial < 200; ++trial) {
    const int k1 = rng.uniform_int(2, 3), k2 = rng.uniform_int(2, 3);
    const GameSize size(2, {k1, k2});
    const Game g = sample_identical(rng, size);
    const auto via_support = enumerate_2p(g);
    const auto via_faces = enumerate_potential(size, g.payoffs(0));
    REQUIRE(via_support.size() == via_faces.size());
    for (size_t i = 0; i < via_support.size(); ++i) {
      const auto a = via_support[i].profile.flat();
      const auto b = via_faces[i].profile.flat();
      for (size_t j = 0; j < a.size(); ++j) CHECK(std::fabs(a[j] - b[j]) < 1e-6);
    }
  }
}

TEST_CASE("coordination equilibria via the potential route") {
  const auto recs = enumerate_potential(kTwoByTwo, {1.0, 0.0, 0.0, 2.0});
  REQUIRE(recs.size() == 3);
  CHECK(recs[1].profile.flat()[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a 2x2x2 game with a strictly dominant joint action") {
  Rng rng(131);
  const GameSize size(3, {2, 2, 2});
  std::vector<double> u(size.joint_count());
  for (double& v : u) v = rng.uniform01();          // everything below 1
  u[size.joint_index({0, 0, 0})] = 5.0;              // dominant joint action
  const auto recs = enumerate_potential(size, u);
  bool found = false;
  for (const auto& r : recs) {
    const auto f = r.profile.flat();
    bool at_origin = true;
    for (double c : f) at_origin = at_origin && std::fabs(c) < 1e-9;
    if (at_origin) {
      found = true;
      CHECK(r.max_regret <= 0.0);
    }
  }
  CHECK(found);
}

TEST_CASE("the 3-player matching game: two pure equilibria and the center") {
  // u = 1 iff all three actions agree. Hand analysis: the only equilibria
  // are (a1,a1,a1), (a2,a2,a2), and the uniform center - partially mixed
  // candidates always admit a profitable deviation. Count 3, odd.
  const GameSize size(3, {2, 2, 2});
  std::vector<double> u(8, 0.0);
  u[size.joint_index({0, 0, 0})] = 1.0;
  u[size.joint_index({1, 1, 1})] = 1.0;
  const auto recs = enumerate_potential(size, u);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].profile.flat() == std::vector<double>{0.0, 0.0, 0.0});
  for (double c : recs[1].profile.flat()) CHECK(c == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(recs[2].profile.flat() == std::vector<double>{1.0, 1.0, 1.0});
  for (const auto& r : recs) {
    CHECK(r.isolated);
    CHECK(r.max_regret <= kIndifferenceTol);
  }
  // repeated enumeration is deterministic
  const auto again = enumerate_potential(size, u);
  REQUIRE(again.size() == recs.size());
  for (size_t i = 0; i < recs.size(); ++i)
    CHECK(again[i].profile.flat() == recs[i].profile.flat());
}

TEST_CASE("dedup merges duplicates and keeps separated points") {
  const Game g = coordination();
  const Profile mixed = profile2({1.0 / 3.0}, {1.0 / 3.0});
  EquilibriumRecord a{mixed, carrier_of(mixed), 0.0, true};
  CHECK(dedup({a, a}, g).size() == 1);

  const Profile shifted = profile2({1.0 / 3.0 + 2e-6}, {1.0 / 3.0});
  EquilibriumRecord b{shifted, carrier_of(shifted), 0.0, true};
  CHECK(dedup({a, b}, g, 1e-6).size() == 2);

  // the cluster centroid re-verifies (members at solver accuracy)
  const Profile near = profile2({1.0 / 3.0 + 1e-9}, {1.0 / 3.0});
  EquilibriumRecord c{near, carrier_of(near), 0.0, true};
  const auto merged = dedup({a, c}, g, 1e-6);
  REQUIRE(merged.size() == 1);
  CHECK(std::fabs(merged[0].max_regret) <= 2.0 * kIndifferenceTol);
  // the non-isolated flag survives merging
  EquilibriumRecord d{near, carrier_of(near), 0.0, false};
  CHECK_FALSE(dedup({a, d}, g, 1e-6)[0].isolated);
}

TEST_CASE("every emitted record satisfies its own regret bound") {
  Rng rng(137);
  for (int trial = 0; trial < 50; ++trial) {
    const Game g = sample_identical(rng, kTwoByTwo);
    for (const auto& r : enumerate_2p(g)) {
      CHECK(r.max_regret <= kIndifferenceTol);
      CHECK(verify_equilibrium(g, r.profile) <= kIndifferenceTol);
    }
  }
}

TEST_CASE("equilibrium counts of random identical 2x2 games are odd") {
  Rng rng(139);
  int odd = 0, total = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Game g = sample_identical(rng, kTwoByTwo);
    const auto recs = enumerate_2p(g);
    bool nonisolated = false;
    for (const auto& r : recs) nonisolated = nonisolated || !r.isolated;
    if (nonisolated) continue;  // excluded as indeterminate
    ++total;
    if (recs.size() % 2 == 1) ++odd;
  }
  CHECK(total >= 290);
  CHECK(static_cast<double>(odd) / total >= 0.99);
}

TEST_CASE("filtered critical points are reported") {
  // anti-coordination potential: interior critical point fails nothing, but
  // the pure diagonal profiles are rejected by the best-response filter
  EnumStats stats;
  const auto recs = enumerate_potential(kTwoByTwo, {0.0, 1.0, 1.0, 0.0}, kIndifferenceTol, 0, &stats);
  CHECK(recs.size() == 3);
  CHECK(stats.filtered_critical_points > 0);
}
