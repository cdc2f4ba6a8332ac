#include <doctest.h>

#include <cmath>

#include "reggames/equilibrium.hpp"
#include "reggames/potential.hpp"
#include "reggames/regularity.hpp"
#include "reggames/rng.hpp"
#include "reggames/serialization.hpp"
#include "test_util.hpp"

using namespace reggames;

TEST_CASE("game json round-trips both the general and shared forms") {
  Rng rng(401);
  const GameSize size(2, {2, 3});
  const Game general(size, {testutil::random_vector(rng, 6), testutil::random_vector(rng, 6)});
  const Game back = game_from_json(game_to_json(general));
  for (int i = 0; i < 2; ++i) CHECK(back.payoffs(i) == general.payoffs(i));

  const Game shared = sample_identical(rng, size);
  const json j = game_to_json(shared);
  CHECK(j.at("shared") == true);
  const Game shared_back = game_from_json(j);
  CHECK(shared_back.identical_payoffs());
  CHECK(shared_back.payoffs(1) == shared.payoffs(0));
}

TEST_CASE("profile json carries both coordinate systems") {
  Rng rng(403);
  const GameSize size(2, {3, 2});
  const Profile x = testutil::random_interior_profile(rng, size);
  const json j = profile_to_json(x);
  REQUIRE(j.contains("x"));
  REQUIRE(j.contains("sigma"));
  const Profile via_x = profile_from_json(json{{"x", j.at("x")}});
  const Profile via_sigma = profile_from_json(json{{"sigma", j.at("sigma")}});
  const auto fx = via_x.flat(), fs = via_sigma.flat(), f0 = x.flat();
  for (size_t k = 0; k < f0.size(); ++k) {
    CHECK(std::fabs(fx[k] - f0[k]) < 1e-15);
    CHECK(std::fabs(fs[k] - f0[k]) < 1e-15);
  }
}

TEST_CASE("record and certificate json expose the documented fields") {
  const Game g = degenerate_example_game();
  const auto recs = enumerate_2p(g);
  REQUIRE(!recs.empty());
  const json rj = record_to_json(recs[0]);
  CHECK(rj.contains("x"));
  CHECK(rj.contains("sigma"));
  CHECK(rj.contains("carrier"));
  CHECK(rj.contains("max_regret"));
  CHECK(rj.at("isolated") == false);

  const auto cert = certify(g, recs[0].profile);
  const json cj = certificate_to_json(cert);
  CHECK(cj.at("verdict") == "first_order_degenerate");
  CHECK(cj.contains("extended_carrier"));
  CHECK(cj.contains("gradient_witnesses"));
  CHECK(cj.contains("x_jacobian_min_singular"));
  CHECK(cj.contains("delta_jacobian_min_singular"));
  CHECK(cj.contains("hessian_min_singular"));
  CHECK(cj.contains("reference_actions"));
  CHECK(cj.contains("tolerance"));
  CHECK(cj.contains("singular_threshold"));
  // the pure-carrier sentinel serializes as a string, not a JSON null
  const auto pure_cert = certify(g, Profile::pure(GameSize(2, {2, 2}), {1, 0}));
  CHECK(certificate_to_json(pure_cert).at("hessian_min_singular") == "inf");
}

TEST_CASE("sign pattern json round-trip and validation") {
  SignPatternMatrix m(2, 3);
  m.set(0, 0, 1);
  m.set(0, 2, -1);
  m.set(1, 1, 1);
  const SignPatternMatrix back = sign_pattern_from_json(sign_pattern_to_json(m));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(back.at(r, c) == m.at(r, c));
  CHECK_THROWS_AS(sign_pattern_from_json(json::parse("[[2]]")), std::invalid_argument);
  CHECK_THROWS_AS(sign_pattern_from_json(json::parse("[[1],[1,0]]")), std::invalid_argument);
}

TEST_CASE("decomposition json") {
  Rng rng(405);
  auto [game, dec] = sample_weighted(rng, GameSize(2, {2, 2}));
  const json j = decomposition_to_json(dec);
  CHECK(j.at("kind") == "weighted");
  CHECK(j.at("potential").size() == 4);
  CHECK(j.at("weights").size() == 2);
  CHECK(j.at("dummies").size() == 2);
}
