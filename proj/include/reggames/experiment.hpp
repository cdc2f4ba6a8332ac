#pragma once

// Seeded Monte Carlo experiment harness. Per-sample rng streams are derived
// from the master seed by counter-based splitting, so serial and parallel
// runs produce byte-identical row tables. Rows go to CSV, aggregates to JSON.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "reggames/equilibrium.hpp"
#include "reggames/game.hpp"
#include "reggames/potential.hpp"
#include "reggames/regularity.hpp"
#include "reggames/rng.hpp"
#include "reggames/sign_structure.hpp"

namespace reggames {

enum class ExperimentKind {
  oddness,
  regularity_rate,
  rank_sweep,
  lmatrix_sweep,
  equivalence_triangle,
  potential_roundtrip,
};

enum class GameClass { identical, exact, weighted, general };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::oddness: return "oddness";
    case ExperimentKind::regularity_rate: return "regularity_rate";
    case ExperimentKind::rank_sweep: return "rank_sweep";
    case ExperimentKind::lmatrix_sweep: return "lmatrix_sweep";
    case ExperimentKind::equivalence_triangle: return "equivalence_triangle";
    case ExperimentKind::potential_roundtrip: return "potential_roundtrip";
  }
  return "unknown";
}

inline const char* to_string(GameClass c) {
  switch (c) {
    case GameClass::identical: return "identical";
    case GameClass::exact: return "exact";
    case GameClass::weighted: return "weighted";
    case GameClass::general: return "general";
  }
  return "unknown";
}

inline std::optional<ExperimentKind> experiment_kind_from(const std::string& s) {
  if (s == "oddness") return ExperimentKind::oddness;
  if (s == "regularity_rate") return ExperimentKind::regularity_rate;
  if (s == "rank_sweep") return ExperimentKind::rank_sweep;
  if (s == "lmatrix_sweep") return ExperimentKind::lmatrix_sweep;
  if (s == "equivalence_triangle") return ExperimentKind::equivalence_triangle;
  if (s == "potential_roundtrip") return ExperimentKind::potential_roundtrip;
  return std::nullopt;
}

inline std::optional<GameClass> game_class_from(const std::string& s) {
  if (s == "identical") return GameClass::identical;
  if (s == "exact") return GameClass::exact;
  if (s == "weighted") return GameClass::weighted;
  if (s == "general") return GameClass::general;
  return std::nullopt;
}

struct Tolerances {
  double carrier = kCarrierTol;
  double indifference = kIndifferenceTol;
  double dedup_radius = 1e-6;
  double singular_rel = kSingularTolRel;
  double potential = 1e-8;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::oddness;
  GameClass game_class = GameClass::identical;
  GameSize size{2, {2, 2}};
  int samples = 100;
  std::uint64_t master_seed = 0;
  Tolerances tol;
  std::string output_path;  // prefix; rows go to <prefix>.csv, aggregates to <prefix>.json
  int threads = 0;          // 0: hardware concurrency
  bool allow_large = false;  // lift the desk-scale cap (N <= 3, K_i <= 4)
};

struct SampleRow {
  int sample = 0;
  std::uint64_t seed = 0;
  std::string game_hash;
  int eq_count = 0;
  int regular = 0;
  int first_degenerate = 0;
  int second_degenerate = 0;
  int nonisolated = 0;
  bool indeterminate = false;  // excluded from rate denominators
  bool odd = false;
  double min_jacobian_x = std::numeric_limits<double>::infinity();
  double min_jacobian_delta = std::numeric_limits<double>::infinity();
  double min_hessian = std::numeric_limits<double>::infinity();
  bool rank_ok = true;
  bool lmatrix_ok = true;
  bool triangle_ok = true;
  bool roundtrip_ok = true;
  std::string note;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SampleRow> rows;
  int counted = 0;  // non-indeterminate random samples
  int total_equilibria = 0;
  double odd_rate = 0.0;
  double regular_rate = 0.0;
  double indeterminate_rate = 0.0;
  int rank_failures = 0;
  int lmatrix_failures = 0;
  int triangle_failures = 0;
  int roundtrip_failures = 0;
  int error_count = 0;
  bool canary_present = false;
  bool canary_flagged_irregular = false;
  double runtime_sec = 0.0;
  bool pass = false;

  std::string rows_csv() const;
  nlohmann::json aggregates_json() const;
};

namespace detail {

inline std::string hash_game(const Game& game) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (int i = 0; i < game.size().players(); ++i) {
    const int a = game.size().actions(i);
    mix(&a, sizeof a);
    mix(game.payoffs(i).data(), game.payoffs(i).size() * sizeof(double));
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Game sample_general(Rng& rng, const GameSize& size) {
  std::vector<std::vector<double>> payoffs(size.players());
  for (auto& u : payoffs) {
    u.resize(size.joint_count());
    for (double& v : u) v = rng.normal();
  }
  return Game(size, std::move(payoffs));
}

struct SampledGame {
  Game game;
  std::optional<PotentialDecomposition> decomposition;  // for exact/weighted classes
};

inline SampledGame sample_game(Rng& rng, GameClass cls, const GameSize& size) {
  switch (cls) {
    case GameClass::identical: return {sample_identical(rng, size), std::nullopt};
    case GameClass::exact: {
      auto [g, d] = sample_exact(rng, size);
      return {std::move(g), std::move(d)};
    }
    case GameClass::weighted: {
      auto [g, d] = sample_weighted(rng, size);
      return {std::move(g), std::move(d)};
    }
    case GameClass::general: return {sample_general(rng, size), std::nullopt};
  }
  throw std::logic_error("sample_game: bad class");
}

// Enumerate the sampled game's equilibria: direct support enumeration for two
// players; via the potential for larger potential games. Records are
// re-verified against the actual game.
inline std::vector<EquilibriumRecord> enumerate_sample(const SampledGame& s, const Tolerances& tol) {
  const Game& game = s.game;
  std::vector<EquilibriumRecord> recs;
  if (game.size().players() == 2) {
    recs = enumerate_2p(game, tol.indifference);
  } else {
    const std::vector<double>* potential = nullptr;
    if (s.decomposition)
      potential = &s.decomposition->potential;
    else if (game.identical_payoffs())
      potential = &game.payoffs(0);
    if (!potential)
      throw std::runtime_error("enumeration for 3+ players requires potential structure");
    recs = enumerate_potential(game.size(), *potential, tol.indifference);
    for (auto& r : recs) r.max_regret = verify_equilibrium(game, r.profile);
  }
  return recs;
}

// One (carrier, x) draw with carr(x) contained in the carrier set.
inline std::pair<Carrier, Profile> sample_carrier_and_point(Rng& rng, const GameSize& size) {
  std::vector<std::vector<int>> supports(size.players());
  std::vector<SimplexStrategy> sigmas;
  for (int i = 0; i < size.players(); ++i) {
    const int k = size.actions(i);
    const int mask = rng.uniform_int(1, (1 << k) - 1);
    for (int a = 0; a < k; ++a)
      if (mask & (1 << a)) supports[i].push_back(a);
    // sub-support: each carrier action kept with probability 0.7, at least one
    std::vector<int> active;
    for (int a : supports[i])
      if (rng.bernoulli(0.7)) active.push_back(a);
    if (active.empty()) active.push_back(supports[i][rng.uniform_int(0, static_cast<int>(supports[i].size()) - 1)]);
    std::vector<double> w(k, 0.0);
    double total = 0.0;
    for (int a : active) {
      w[a] = -std::log(1.0 - rng.uniform01());
      total += w[a];
    }
    for (int a : active) w[a] /= total;
    sigmas.emplace_back(std::move(w));
  }
  return {Carrier(std::move(supports)), Profile::from_simplex(sigmas)};
}

}  // namespace detail

namespace detail {

inline void run_one_sample(const ExperimentConfig& cfg, int row_index, bool is_canary,
                           SampleRow& row) {
  row.sample = row_index;
  row.seed = is_canary ? 0 : derive_stream_seed(cfg.master_seed, static_cast<std::uint64_t>(row_index));
  Rng rng(row.seed);

  switch (cfg.kind) {
    case ExperimentKind::rank_sweep:
    case ExperimentKind::lmatrix_sweep: {
      // the rank statement concerns carriers with at least one free
      // coordinate; redraw on pure carriers
      auto [carrier, x] = sample_carrier_and_point(rng, cfg.size);
      while (carrier.free_dim() == 0) {
        auto redraw = sample_carrier_and_point(rng, cfg.size);
        carrier = std::move(redraw.first);
        x = std::move(redraw.second);
      }
      const CarrierMatrixBundle bundle = build_bundle(cfg.size, x, carrier);
      const auto [full, ratio] = full_row_rank(bundle.a, cfg.tol.singular_rel);
      row.rank_ok = full;
      row.min_jacobian_x = ratio;
      if (cfg.kind == ExperimentKind::lmatrix_sweep)
        row.lmatrix_ok = verify_l_property(cfg.size, x, carrier) && full;
      row.game_hash = "-";
      return;
    }
    case ExperimentKind::potential_roundtrip: {
      const GameClass cls = cfg.game_class == GameClass::identical ? GameClass::exact : cfg.game_class;
      SampledGame s = sample_game(rng, cls, cfg.size);
      row.game_hash = hash_game(s.game);
      bool ok = true;
      if (cls == GameClass::exact) {
        auto u = exact_potential_of(s.game, cfg.tol.potential);
        if (!u) {
          ok = false;
        } else {
          const auto& truth = s.decomposition->potential;
          const double shift = truth[0] - (*u)[0];
          for (size_t t = 0; t < u->size(); ++t)
            ok = ok && std::fabs((*u)[t] + shift - truth[t]) < 1e-8;
        }
      } else {
        auto dec = weighted_potential_of(s.game, cfg.tol.potential);
        if (!dec) {
          ok = false;
        } else {
          const auto& wt = s.decomposition->weights;
          const auto& wr = dec->weights;
          for (size_t i = 0; i < wt.size() && ok; ++i) {
            const double true_ratio = wt[i] / wt[0];
            const double rec_ratio = wr[i] / wr[0];
            ok = std::fabs(rec_ratio - true_ratio) <= 1e-8 * std::max(1.0, std::fabs(true_ratio));
          }
          // recovered potential equals w_1 * true potential up to a constant
          const double scale = wt[0];
          const double shift = scale * s.decomposition->potential[0] - dec->potential[0];
          for (size_t t = 0; t < dec->potential.size() && ok; ++t)
            ok = std::fabs(dec->potential[t] + shift - scale * s.decomposition->potential[t]) < 1e-8;
        }
      }
      row.roundtrip_ok = ok;
      return;
    }
    default: break;
  }

  // enumeration-based experiments
  SampledGame s = is_canary ? SampledGame{degenerate_example_game(), std::nullopt}
                            : sample_game(rng, cfg.game_class, cfg.size);
  row.game_hash = hash_game(s.game);
  const std::vector<EquilibriumRecord> recs = enumerate_sample(s, cfg.tol);
  row.eq_count = static_cast<int>(recs.size());
  for (const auto& r : recs)
    if (!r.isolated) ++row.nonisolated;
  row.odd = row.eq_count % 2 == 1;

  if (cfg.kind == ExperimentKind::oddness) {
    row.indeterminate = row.nonisolated > 0;
    if (row.indeterminate) row.note = "nonisolated";
    return;
  }

  bool any_borderline = false;
  for (const auto& r : recs) {
    const RegularityCertificate cert = certify(s.game, r.profile, cfg.tol.indifference);
    switch (cert.verdict) {
      case RegularityVerdict::regular: ++row.regular; break;
      case RegularityVerdict::first_order_degenerate: ++row.first_degenerate; break;
      case RegularityVerdict::second_order_degenerate: ++row.second_degenerate; break;
      case RegularityVerdict::not_equilibrium: break;
    }
    any_borderline = any_borderline || cert.borderline;
    row.min_jacobian_x = std::min(row.min_jacobian_x, cert.x_jacobian_min_singular);
    row.min_jacobian_delta = std::min(row.min_jacobian_delta, cert.delta_jacobian_min_singular);
    if (std::isfinite(cert.hessian_min_singular))
      row.min_hessian = std::min(row.min_hessian, cert.hessian_min_singular);
    if (cfg.kind == ExperimentKind::equivalence_triangle) {
      const bool nd = cert.verdict == RegularityVerdict::regular;
      const bool jx = cert.x_jacobian_min_singular >= cert.singular_threshold;
      const bool jd = cert.delta_jacobian_min_singular >= cert.singular_threshold;
      if (!cert.borderline && !(nd == jx && jx == jd)) row.triangle_ok = false;
    }
  }
  row.indeterminate = any_borderline || row.nonisolated > 0;
  if (row.indeterminate) row.note = row.nonisolated > 0 ? "nonisolated" : "guard_band";
}

}  // namespace detail

inline ExperimentReport run(const ExperimentConfig& cfg) {
  if (cfg.samples < 1) throw std::invalid_argument("experiment: samples must be >= 1");
  if (!cfg.allow_large) {
    if (cfg.size.players() > 3) throw std::invalid_argument("experiment: player cap is 3 (override to lift)");
    for (int i = 0; i < cfg.size.players(); ++i)
      if (cfg.size.actions(i) > 4)
        throw std::invalid_argument("experiment: action cap is 4 (override to lift)");
  }
  const bool enumerates = cfg.kind == ExperimentKind::oddness ||
                          cfg.kind == ExperimentKind::regularity_rate ||
                          cfg.kind == ExperimentKind::equivalence_triangle;
  if (enumerates && cfg.size.players() > 2 && cfg.game_class == GameClass::general)
    throw std::invalid_argument("experiment: 3-player enumeration needs a potential game class");

  ExperimentReport report;
  report.config = cfg;
  report.canary_present = enumerates && cfg.game_class == GameClass::identical;
  const int row_count = cfg.samples + (report.canary_present ? 1 : 0);
  report.rows.assign(row_count, SampleRow{});

  const auto t0 = std::chrono::steady_clock::now();
  int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, row_count);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= row_count) break;
      const bool is_canary = report.canary_present && idx == 0;
      SampleRow& row = report.rows[idx];
      try {
        detail::run_one_sample(cfg, idx, is_canary, row);
      } catch (const std::exception& e) {
        row.sample = idx;
        row.note = std::string("error: ") + e.what();
        row.indeterminate = true;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  report.runtime_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // aggregates over the random samples (the canary row is kept out of rates)
  int odd = 0, all_regular = 0, indeterminate = 0;
  for (int i = 0; i < row_count; ++i) {
    const SampleRow& row = report.rows[i];
    if (row.note.rfind("error:", 0) == 0) ++report.error_count;
    const bool is_canary = report.canary_present && i == 0;
    if (is_canary) {
      report.canary_flagged_irregular =
          row.first_degenerate + row.second_degenerate > 0 || row.nonisolated > 0;
      continue;
    }
    report.total_equilibria += row.eq_count;
    if (!row.rank_ok) ++report.rank_failures;
    if (!row.lmatrix_ok) ++report.lmatrix_failures;
    if (!row.triangle_ok) ++report.triangle_failures;
    if (!row.roundtrip_ok) ++report.roundtrip_failures;
    if (row.indeterminate) {
      ++indeterminate;
      continue;
    }
    ++report.counted;
    if (row.odd) ++odd;
    if (row.eq_count > 0 && row.regular == row.eq_count) ++all_regular;
  }
  report.indeterminate_rate = static_cast<double>(indeterminate) / cfg.samples;
  if (report.counted > 0) {
    report.odd_rate = static_cast<double>(odd) / report.counted;
    report.regular_rate = static_cast<double>(all_regular) / report.counted;
  }

  bool pass = report.error_count == 0;
  switch (cfg.kind) {
    case ExperimentKind::oddness:
      pass = pass && report.odd_rate >= 0.99 && report.indeterminate_rate <= 0.01;
      break;
    case ExperimentKind::regularity_rate:
      pass = pass && report.regular_rate >= 0.99 && report.indeterminate_rate <= 0.01;
      break;
    case ExperimentKind::rank_sweep:
      pass = pass && report.rank_failures == 0;
      break;
    case ExperimentKind::lmatrix_sweep:
      pass = pass && report.lmatrix_failures == 0 && report.rank_failures == 0;
      break;
    case ExperimentKind::equivalence_triangle:
      pass = pass && report.triangle_failures == 0 && report.indeterminate_rate <= 0.01;
      break;
    case ExperimentKind::potential_roundtrip:
      pass = pass && report.roundtrip_failures == 0;
      break;
  }
  if (report.canary_present) pass = pass && report.canary_flagged_irregular;
  report.pass = pass;
  return report;
}

inline std::string ExperimentReport::rows_csv() const {
  std::string out =
      "sample,seed,game_hash,eq_count,regular,first_order_degenerate,second_order_degenerate,"
      "nonisolated,indeterminate,odd,min_jacobian_x,min_jacobian_delta,min_hessian,rank_ok,"
      "lmatrix_ok,triangle_ok,roundtrip_ok,note\n";
  for (const auto& r : rows) {
    out += std::to_string(r.sample) + ',' + std::to_string(r.seed) + ',' + r.game_hash + ',';
    out += std::to_string(r.eq_count) + ',' + std::to_string(r.regular) + ',';
    out += std::to_string(r.first_degenerate) + ',' + std::to_string(r.second_degenerate) + ',';
    out += std::to_string(r.nonisolated) + ',' + (r.indeterminate ? "1" : "0") + ',';
    out += (r.odd ? "1" : "0") + std::string(",");
    out += detail::format_double(r.min_jacobian_x) + ',' + detail::format_double(r.min_jacobian_delta) +
           ',' + detail::format_double(r.min_hessian) + ',';
    out += (r.rank_ok ? "1" : "0") + std::string(",") + (r.lmatrix_ok ? "1" : "0") + ',';
    out += (r.triangle_ok ? "1" : "0") + std::string(",") + (r.roundtrip_ok ? "1" : "0") + ',';
    out += r.note + '\n';
  }
  return out;
}

inline nlohmann::json ExperimentReport::aggregates_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(config.kind);
  j["game_class"] = to_string(config.game_class);
  std::string size_str = std::to_string(config.size.actions(0));
  for (int i = 1; i < config.size.players(); ++i)
    size_str += "x" + std::to_string(config.size.actions(i));
  j["size"] = size_str;
  j["samples"] = config.samples;
  j["master_seed"] = config.master_seed;
  j["counted"] = counted;
  j["total_equilibria"] = total_equilibria;
  j["odd_rate"] = odd_rate;
  j["regular_rate"] = regular_rate;
  j["indeterminate_rate"] = indeterminate_rate;
  j["rank_failures"] = rank_failures;
  j["lmatrix_failures"] = lmatrix_failures;
  j["triangle_failures"] = triangle_failures;
  j["roundtrip_failures"] = roundtrip_failures;
  j["error_count"] = error_count;
  if (canary_present) j["canary_flagged_irregular"] = canary_flagged_irregular;
  j["runtime_sec"] = runtime_sec;
  j["pass"] = pass;
  return j;
}

}  // namespace reggames
