// reggames: analyze potential structure, enumerate and certify equilibria,
// and run the seeded Monte Carlo experiments.
//
// Exit codes: 0 pass, 1 threshold failure, 2 usage error.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "reggames/experiment.hpp"
#include "reggames/serialization.hpp"

namespace {

using namespace reggames;

GameSize parse_size(const std::string& text) {
  std::vector<int> actions;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t next = text.find_first_of("xX", pos);
    if (next == std::string::npos) next = text.size();
    actions.push_back(std::stoi(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return GameSize(static_cast<int>(actions.size()), actions);
}

int cmd_analyze(const std::string& path, double tol) {
  const Game game = game_from_json(load_json_file(path));
  json out;
  out["identical"] = game.identical_payoffs();
  if (auto u = exact_potential_of(game, tol))
    out["exact"] = {{"potential", *u}};
  else
    out["exact"] = nullptr;
  if (auto dec = weighted_potential_of(game, tol))
    out["weighted"] = decomposition_to_json(*dec);
  else
    out["weighted"] = nullptr;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_enumerate(const std::string& path, double tol, const std::string& out_path) {
  const Game game = game_from_json(load_json_file(path));
  std::vector<EquilibriumRecord> recs;
  if (game.size().players() == 2) {
    recs = enumerate_2p(game, tol);
  } else if (game.identical_payoffs()) {
    recs = enumerate_potential(game.size(), game.payoffs(0), tol);
  } else if (auto dec = weighted_potential_of(game)) {
    recs = enumerate_potential(game.size(), dec->potential, tol);
    for (auto& r : recs) r.max_regret = verify_equilibrium(game, r.profile);
  } else {
    std::cerr << "enumerate: 3+ player games need potential structure\n";
    return 2;
  }
  json out = json::array();
  for (const auto& r : recs) out.push_back(record_to_json(r));
  const std::string text = out.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    save_text_file(out_path, text);
  return 0;
}

int cmd_certify(const std::string& game_path, const std::string& profile_path, double tol) {
  const Game game = game_from_json(load_json_file(game_path));
  const Profile x = profile_from_json(load_json_file(profile_path));
  const RegularityCertificate cert = certify(game, x, tol);
  std::cout << certificate_to_json(cert).dump(2) << "\n";
  return 0;
}

int cmd_lmatrix_check(const std::string& path) {
  const SignPatternMatrix m = sign_pattern_from_json(load_json_file(path));
  const auto witness = l_matrix_failure_witness(m);
  json out;
  out["is_l_matrix"] = !witness.has_value();
  if (witness) {
    std::vector<int> d(witness->begin(), witness->end());
    out["witness_diagonal"] = d;
  } else {
    out["witness_diagonal"] = nullptr;
  }
  std::cout << out.dump(2) << "\n";
  return witness ? 1 : 0;
}

int cmd_experiment(const std::string& name, const std::string& cls, const std::string& size,
                   int samples, std::uint64_t seed, const std::string& out_path, int threads,
                   bool allow_large) {
  ExperimentConfig cfg;
  auto kind = experiment_kind_from(name);
  if (!kind) {
    std::cerr << "unknown experiment: " << name << "\n";
    return 2;
  }
  auto game_class = game_class_from(cls);
  if (!game_class) {
    std::cerr << "unknown game class: " << cls << "\n";
    return 2;
  }
  cfg.kind = *kind;
  cfg.game_class = *game_class;
  cfg.size = parse_size(size);
  cfg.samples = samples;
  cfg.master_seed = seed;
  cfg.threads = threads;
  cfg.allow_large = allow_large;
  if (const char* env = std::getenv("REGGAMES_THREADS")) cfg.threads = std::atoi(env);

  const ExperimentReport report = run(cfg);
  if (!out_path.empty()) {
    std::string prefix = out_path;
    if (prefix.size() > 4 && prefix.substr(prefix.size() - 4) == ".csv")
      prefix = prefix.substr(0, prefix.size() - 4);
    save_text_file(prefix + ".csv", report.rows_csv());
    save_text_file(prefix + ".json", report.aggregates_json().dump(2) + "\n");
  }
  std::cout << report.aggregates_json().dump(2) << "\n";
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regular potential games toolkit"};
  app.require_subcommand(1);

  std::string game_path, profile_path, out_path, pattern_path;
  std::string exp_name, exp_class = "identical", exp_size = "2x2";
  double tol = reggames::kIndifferenceTol;
  double analyze_tol = 1e-8;
  int samples = 100, threads = 0;
  std::uint64_t seed = 0;
  bool allow_large = false;

  auto* analyze = app.add_subcommand("analyze", "detect potential structure of a game");
  analyze->add_option("game", game_path, "game JSON file")->required();
  analyze->add_option("--tol", analyze_tol, "detection tolerance");

  auto* enumerate = app.add_subcommand("enumerate", "enumerate Nash equilibria");
  enumerate->add_option("game", game_path, "game JSON file")->required();
  enumerate->add_option("--tol", tol, "equilibrium tolerance");
  enumerate->add_option("--out", out_path, "write records to this file instead of stdout");

  auto* certify_cmd = app.add_subcommand("certify", "certify an equilibrium as regular/irregular");
  certify_cmd->add_option("game", game_path, "game JSON file")->required();
  certify_cmd->add_option("--profile", profile_path, "profile JSON file")->required();
  certify_cmd->add_option("--tol", tol, "equilibrium tolerance");

  auto* experiment = app.add_subcommand("experiment", "run a seeded Monte Carlo experiment");
  experiment->add_option("name", exp_name,
                         "oddness | regularity_rate | rank_sweep | lmatrix_sweep | "
                         "equivalence_triangle | potential_roundtrip")
      ->required();
  experiment->add_option("--class", exp_class, "identical | exact | weighted | general");
  experiment->add_option("--size", exp_size, "game size, e.g. 2x2 or 2x3x3");
  experiment->add_option("--samples", samples, "number of sampled games/draws");
  experiment->add_option("--seed", seed, "64-bit master seed");
  experiment->add_option("--out", out_path, "output path prefix (.csv rows, .json aggregates)");
  experiment->add_option("--threads", threads, "worker count (REGGAMES_THREADS overrides)");
  experiment->add_flag("--allow-large", allow_large, "lift the desk-scale size caps");

  auto* lmatrix = app.add_subcommand("lmatrix-check", "test a sign pattern for the L-matrix property");
  lmatrix->add_option("pattern", pattern_path, "JSON array of rows over {-1,0,1}")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_analyze(game_path, analyze_tol);
    if (*enumerate) return cmd_enumerate(game_path, tol, out_path);
    if (*certify_cmd) return cmd_certify(game_path, profile_path, tol);
    if (*experiment)
      return cmd_experiment(exp_name, exp_class, exp_size, samples, seed, out_path, threads,
                            allow_large);
    if (*lmatrix) return cmd_lmatrix_check(pattern_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
