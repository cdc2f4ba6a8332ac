#include <doctest.h>

#include <string>

#include "reggames/experiment.hpp"

using namespace reggames;

namespace {

ExperimentConfig base_config(ExperimentKind kind, GameClass cls, GameSize size, int samples,
                             std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.game_class = cls;
  cfg.size = size;
  cfg.samples = samples;
  cfg.master_seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("reports are byte-identical across thread counts") {
  ExperimentConfig cfg =
      base_config(ExperimentKind::oddness, GameClass::identical, GameSize(2, {2, 2}), 40, 42);
  cfg.threads = 1;
  const ExperimentReport serial = run(cfg);
  cfg.threads = 4;
  const ExperimentReport parallel = run(cfg);
  CHECK(serial.rows_csv() == parallel.rows_csv());
  auto a = serial.aggregates_json();
  auto b = parallel.aggregates_json();
  a.erase("runtime_sec");
  b.erase("runtime_sec");
  CHECK(a == b);
}

TEST_CASE("oddness run on identical 2x2 games passes with the canary flagged") {
  const ExperimentReport report =
      run(base_config(ExperimentKind::oddness, GameClass::identical, GameSize(2, {2, 2}), 100, 42));
  CHECK(report.pass);
  CHECK(report.odd_rate >= 0.99);
  CHECK(report.canary_present);
  CHECK(report.canary_flagged_irregular);
  // canary row: the degenerate family is detected and excluded from rates
  CHECK(report.rows[0].nonisolated > 0);
  CHECK(report.rows[0].indeterminate);
  CHECK(static_cast<int>(report.rows.size()) == 101);
}

TEST_CASE("regularity run on exact 2x3 games") {
  const ExperimentReport report = run(
      base_config(ExperimentKind::regularity_rate, GameClass::exact, GameSize(2, {2, 3}), 40, 7));
  CHECK(report.pass);
  CHECK(report.regular_rate >= 0.99);
  CHECK(report.indeterminate_rate <= 0.01);
}

TEST_CASE("regularity run on weighted 3-player games uses the potential route") {
  const ExperimentReport report = run(base_config(ExperimentKind::regularity_rate,
                                                  GameClass::weighted, GameSize(3, {2, 2, 2}), 15, 3));
  CHECK(report.error_count == 0);
  CHECK(report.regular_rate >= 0.99);
}

TEST_CASE("rank and L-matrix sweeps report zero failures") {
  const ExperimentReport rank = run(
      base_config(ExperimentKind::rank_sweep, GameClass::identical, GameSize(2, {3, 3}), 150, 11));
  CHECK(rank.pass);
  CHECK(rank.rank_failures == 0);
  const ExperimentReport lmx = run(base_config(ExperimentKind::lmatrix_sweep, GameClass::identical,
                                               GameSize(3, {2, 3, 2}), 150, 12));
  CHECK(lmx.pass);
  CHECK(lmx.lmatrix_failures == 0);
}

TEST_CASE("equivalence triangle and roundtrip experiments pass") {
  const ExperimentReport tri = run(base_config(ExperimentKind::equivalence_triangle,
                                               GameClass::weighted, GameSize(2, {2, 2}), 40, 5));
  CHECK(tri.pass);
  CHECK(tri.triangle_failures == 0);
  const ExperimentReport rt = run(base_config(ExperimentKind::potential_roundtrip,
                                              GameClass::weighted, GameSize(2, {3, 2}), 40, 9));
  CHECK(rt.pass);
  CHECK(rt.roundtrip_failures == 0);
}

TEST_CASE("configs are validated") {
  ExperimentConfig bad =
      base_config(ExperimentKind::oddness, GameClass::identical, GameSize(2, {2, 2}), 0, 1);
  CHECK_THROWS_AS(run(bad), std::invalid_argument);
  ExperimentConfig large =
      base_config(ExperimentKind::oddness, GameClass::identical, GameSize(2, {5, 5}), 5, 1);
  CHECK_THROWS_AS(run(large), std::invalid_argument);
  large.allow_large = true;
  CHECK_NOTHROW(run(large));
  ExperimentConfig general3 = base_config(ExperimentKind::oddness, GameClass::general,
                                          GameSize(3, {2, 2, 2}), 5, 1);
  CHECK_THROWS_AS(run(general3), std::invalid_argument);
}

TEST_CASE("csv rows carry the expected shape") {
  const ExperimentReport report =
      run(base_config(ExperimentKind::oddness, GameClass::exact, GameSize(2, {2, 2}), 10, 21));
  const std::string csv = report.rows_csv();
  CHECK(csv.rfind("sample,seed,game_hash,", 0) == 0);
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 11);  // header + 10 samples (no canary for the exact class)
}
