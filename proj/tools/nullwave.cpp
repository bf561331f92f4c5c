// Scenario runner for the exterior Neumann-wave laboratory.
//
// Subcommands:
//   nullwave run <config.json> [--out DIR] [--seed N]
//   nullwave check-null <spec.json>
//   nullwave check-admissible <spec.json> <obstacle.json>
//   nullwave sweep <config.json> --epsilons 0.02,0.01,0.005
//   nullwave converge <config.json> --dr 0.02,0.01,0.005
//
// Exit codes: 0 success, 2 blowup detected, 3 invalid config,
// 4 numerical divergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nullwave/chaplygin.hpp"
#include "nullwave/errors.hpp"
#include "nullwave/runner.hpp"

using namespace nullwave;
using nlohmann::json;

namespace {

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("<json>", e.what());
  }
  return j;
}

NullFormSpec spec_from_file(const std::string& path) {
  const json j = load_json(path);
  if (j.contains("preset")) {
    const std::string p = j.at("preset").get<std::string>();
    if (p == "chaplygin") return chaplygin_spec();
    if (p == "null_q0") return null_q0_spec();
    if (p == "nonnull_dt2") return nonnull_dt2_spec();
    throw ConfigError("preset", "unknown preset '" + p + "'");
  }
  Mat4 s{};
  QTensor q{};
  if (j.contains("S"))
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) s[a][b] = j.at("S")[a][b].get<double>();
  if (j.contains("Q"))
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int m = 0; m < 4; ++m)
          q[a][b][m] = j.at("Q")[a][b][m].get<double>();
  return NullFormSpec(s, q);
}

ObstacleShape obstacle_from_file(const std::string& path) {
  const json j = load_json(path);
  const std::string kind = j.value("kind", "ball");
  if (kind == "ball") return ObstacleShape::ball(j.value("b", 0.875));
  std::vector<Harmonic> hs;
  for (const auto& h : j.value("harmonics", json::array()))
    hs.push_back({h[0].get<int>(), h[1].get<int>(), h[2].get<double>()});
  return ObstacleShape::star_shaped(j.value("base", 0.875), std::move(hs));
}

void print_verdict(const char* what, const ConditionVerdict& v) {
  json out;
  out["check"] = what;
  out["holds"] = v.holds;
  out["max_residual"] = v.max_residual;
  if (!v.holds) {
    out["witness_omega"] = v.witness_omega;
    out["witness_p"] = v.witness_p;
    out["witness_q"] = v.witness_q;
    out["witness_nu"] = v.witness_nu;
  }
  std::cout << out.dump(2) << "\n";
}

int summary_exit(const RunSummary& s) {
  std::cout << "scenario " << s.scenario << ": exit " << s.exit_code;
  if (s.blowup_time) std::cout << " (blowup at t = " << *s.blowup_time << ")";
  std::cout << "\n  outputs: " << s.out_dir << "\n";
  for (const auto& [k, v] : s.metrics)
    std::cout << "  " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < s.convergence_orders.size(); ++i)
    std::cout << "  order[" << i << "] = " << s.convergence_orders[i] << "\n";
  return s.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exterior-domain Neumann-wave laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir, spec_path, obstacle_path;
  std::string eps_csv, dr_csv;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("config", config_path, "scenario JSON")->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_given = true;
  });

  auto* chknull = app.add_subcommand("check-null", "null-condition check");
  chknull->add_option("spec", spec_path, "nonlinearity JSON")->required();

  auto* chkadm =
      app.add_subcommand("check-admissible", "admissible-condition check");
  chkadm->add_option("spec", spec_path, "nonlinearity JSON")->required();
  chkadm->add_option("obstacle", obstacle_path, "obstacle JSON")->required();

  auto* sweep = app.add_subcommand("sweep", "epsilon sweep");
  sweep->add_option("config", config_path, "scenario JSON")->required();
  sweep->add_option("--epsilons", eps_csv, "comma-separated epsilons");
  sweep->add_option("--out", out_dir, "output directory override");

  auto* conv = app.add_subcommand("converge", "resolution ladder");
  conv->add_option("config", config_path, "scenario JSON")->required();
  conv->add_option("--dr", dr_csv, "comma-separated spacings");
  conv->add_option("--out", out_dir, "output directory override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (chknull->parsed()) {
      print_verdict("null", check_null(spec_from_file(spec_path)));
      return 0;
    }
    if (chkadm->parsed()) {
      print_verdict("admissible",
                    check_admissible(spec_from_file(spec_path),
                                     obstacle_from_file(obstacle_path)));
      return 0;
    }

    ScenarioConfig cfg = parse_config(config_path);
    if (seed_given) cfg.seed = seed;
    if (sweep->parsed()) {
      cfg.scenario = ScenarioKind::EpsilonSweep;
      if (!eps_csv.empty()) cfg.epsilons = parse_list(eps_csv);
      validate_config(cfg);
      return summary_exit(run_epsilon_sweep(cfg, out_dir));
    }
    if (conv->parsed()) {
      cfg.scenario = ScenarioKind::ConvergenceStudy;
      if (!dr_csv.empty()) cfg.drs = parse_list(dr_csv);
      validate_config(cfg);
      return summary_exit(run_convergence_study(cfg, out_dir));
    }
    return summary_exit(run_scenario(cfg, out_dir));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const DivergenceError& e) {
    std::cerr << "numerical divergence at t = " << e.time() << ": " << e.what()
              << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
