#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nullwave/scenario.hpp"

namespace nullwave {

/// Outcome of one scenario execution. Exit codes: 0 success, 2 blowup
/// detected (a reportable outcome, expected for non-null scenarios),
/// 3 invalid config, 4 numerical divergence.
struct RunSummary {
  int exit_code = 0;
  std::string scenario;
  std::string out_dir;
  std::optional<double> blowup_time;
  double amplification = 0.0;   // max_t sup|du| / sup|du|(0)
  double sup_envelope = 0.0;    // max_t D(t)
  std::map<std::string, double> metrics;
  std::vector<double> convergence_orders;
  std::vector<std::string> manifest;
};

/// Executes the configured scenario pipeline and writes CSV/JSON artifacts
/// under cfg.output.dir (overridable). Deterministic for a fixed config and
/// seed; the manifest is written last, atomically.
RunSummary run_scenario(const ScenarioConfig& cfg,
                        const std::string& out_dir_override = "");

/// Null (Q0) vs non-null ((d_t u)^2) contrast at identical data.
struct ContrastReport {
  RunSummary null_run;
  RunSummary nonnull_run;
  double null_amplification = 0.0;
  double nonnull_amplification = 0.0;
  double ratio = 0.0;  // nonnull / null
  bool nonnull_blowup = false;
  bool degenerate = false;  // both runs identically zero
};

ContrastReport compare_null_vs_nonnull(double epsilon, double t_final,
                                       const ScenarioConfig* base = nullptr);

/// Fan-out helpers used by the CLI subcommands. Parallelism is capped by
/// NULLWAVE_THREADS; aggregation is single-threaded.
RunSummary run_epsilon_sweep(const ScenarioConfig& cfg,
                             const std::string& out_dir_override = "");
RunSummary run_convergence_study(const ScenarioConfig& cfg,
                                 const std::string& out_dir_override = "");

int sweep_thread_cap();

}  // namespace nullwave
