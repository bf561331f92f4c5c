#include "nullwave/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "nullwave/chaplygin.hpp"
#include "nullwave/errors.hpp"
#include "nullwave/oracle.hpp"
#include "nullwave/solver3d.hpp"

namespace nullwave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot_csv(const fs::path& path, const RadialGrid& grid,
                        const Snapshot& snap) {
  std::ofstream os(path);
  os << "r,u,du_dt,du_dr\n";
  for (std::size_t j = 0; j < grid.n; ++j)
    os << fmt(grid.r(j)) << ',' << fmt(snap.u[j]) << ',' << fmt(snap.du_t[j])
       << ',' << fmt(snap.du_r[j]) << "\n";
}

void write_flow_csv(const fs::path& path, const FlowReport& flow) {
  std::ofstream os(path);
  os << "t,rho_min,rho_max,max_speed,slip_residual\n";
  for (const auto& fr : flow.frames)
    os << fmt(fr.t) << ',' << fmt(fr.rho_min) << ',' << fmt(fr.rho_max) << ','
       << fmt(fr.max_speed) << ',' << fmt(fr.slip_residual) << "\n";
}

double sup_envelope(const DiagnosticsReport& rep) {
  double d = 0.0;
  for (const auto& row : rep.rows) d = std::max(d, row.envelope_d);
  return d;
}

struct Artifacts {
  fs::path dir;
  std::vector<std::string> files;

  std::ofstream open(const std::string& name) {
    files.push_back(name);
    return std::ofstream(dir / name);
  }
};

void finalize_manifest(Artifacts& art, const RunSummary& summary) {
  json m;
  m["scenario"] = summary.scenario;
  m["exit_code"] = summary.exit_code;
  m["files"] = art.files;
  const fs::path tmp = art.dir / "manifest.json.tmp";
  {
    std::ofstream os(tmp);
    os << m.dump(2) << "\n";
  }
  fs::rename(tmp, art.dir / "manifest.json");
}

json summary_json(const RunSummary& s) {
  json j;
  j["scenario"] = s.scenario;
  j["exit_code"] = s.exit_code;
  j["amplification"] = s.amplification;
  j["sup_envelope"] = s.sup_envelope;
  if (s.blowup_time) j["blowup_time"] = *s.blowup_time;
  for (const auto& [k, v] : s.metrics) j[k] = v;
  if (!s.convergence_orders.empty())
    j["convergence_orders"] = s.convergence_orders;
  return j;
}

RunSummary evolve_scenario(const ScenarioConfig& cfg, Artifacts& art) {
  RunSummary summary;
  summary.scenario = scenario_name(cfg.scenario);
  const RadialGrid grid = cfg.build_grid();
  const NullFormSpec spec = cfg.nonlinearity.build();
  const ObstacleShape shape = cfg.obstacle.build();

  BumpDataSpec dspec = cfg.data;
  if (cfg.scenario == ScenarioKind::OracleCompare) {
    dspec.u0_amp = 0.0;  // the oracle problem has vanishing history
    dspec.u1_amp = 0.0;
  }
  const double clearance =
      cfg.scenario == ScenarioKind::OracleCompare ? 1.0 : shape.max_b();
  const InitialData data = make_bump_data(grid, clearance, dspec);

  EvolveOptions opts;
  opts.t_final = cfg.t_final;
  opts.cfl = cfg.grid.cfl;
  opts.outer = cfg.grid.outer;
  opts.sample_every = cfg.diagnostics.sample_every;
  opts.order_cap = cfg.diagnostics.order_cap;
  opts.keep_all_snapshots = true;
  opts.forcing = cfg.forcing.build();

  RunResult res;
  try {
    res = evolve(grid, spec, data, opts);
  } catch (const DivergenceError& e) {
    summary.exit_code = 4;
    summary.metrics["divergence_time"] = e.time();
    return summary;
  }

  summary.amplification =
      res.initial_sup_du > 0 ? res.max_sup_du / res.initial_sup_du : 0.0;
  summary.sup_envelope = sup_envelope(res.report);
  if (res.status == RunStatus::Blowup) {
    summary.exit_code = 2;
    summary.blowup_time = res.blowup_time;
  }

  if (cfg.output.csv) {
    {
      auto os = art.open("diagnostics.csv");
      write_diagnostics_csv(os, res.report);
    }
    const std::size_t stride =
        std::max<std::size_t>(1, res.snapshots.size() / 12);
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
      if (k % stride && k + 1 != res.snapshots.size()) continue;
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_t%08.3f.csv",
                    res.snapshots[k].t);
      art.files.emplace_back(name);
      write_snapshot_csv(art.dir / name, grid, res.snapshots[k]);
    }
  }

  const auto fit = local_energy_decay_fit(res.report);
  if (!fit.degenerate) {
    summary.metrics["decay_rate"] = fit.rate;
    summary.metrics["decay_r_squared"] = fit.r_squared;
  }
  if (const auto k10 = kss_ratio_at(res.report, 10.0))
    summary.metrics["kss_ratio_t10"] = *k10;
  if (const auto kT = kss_ratio_at(res.report, cfg.t_final))
    summary.metrics["kss_ratio_final"] = *kT;

  if (cfg.scenario == ScenarioKind::ChaplyginRadial) {
    const GasParameters gas = GasParameters::make(cfg.gas.rho_bar, cfg.gas.p0);
    const FlowReport flow = flow_report(res.snapshots, grid, gas);
    if (cfg.output.csv) {
      auto os = art.open("flow.csv");
      (void)os;
      write_flow_csv(art.dir / "flow.csv", flow);
    }
    double rho_min = 1e300;
    for (const auto& fr : flow.frames) rho_min = std::min(rho_min, fr.rho_min);
    summary.metrics["rho_min"] = rho_min;
    summary.metrics["flow_physical"] = flow.physical ? 1.0 : 0.0;
    if (!flow.physical) summary.metrics["violation_time"] = flow.violation_time;
  }

  if (cfg.scenario == ScenarioKind::OracleCompare) {
    SphericalOracleProblem prob;
    prob.f1 = opts.forcing;
    prob.quad_step = 0.01;
    prob.f1_r_lo = cfg.forcing.center - cfg.forcing.width;
    prob.f1_r_hi = cfg.forcing.center + cfg.forcing.width;
    prob.f1_t_hi = cfg.forcing.t_off;
    const SphericalOracle oracle(prob);

    // Mandatory residual validation before the formula is trusted.
    const auto res_h = oracle.validate(0.4 * cfg.t_final, 0.6 * cfg.t_final,
                                       1.5, 3.0, 0.1, 3, 4);
    const auto res_h2 = oracle.validate(0.4 * cfg.t_final, 0.6 * cfg.t_final,
                                        1.5, 3.0, 0.05, 3, 4);
    summary.metrics["oracle_pde_residual_h"] = res_h.pde;
    summary.metrics["oracle_pde_residual_h2"] = res_h2.pde;
    summary.metrics["oracle_bc_residual_h2"] = res_h2.bc;
    const bool valid =
        res_h2.pde < 0.5 * res_h.pde + 1e-8 && res_h2.bc < 1e-2;
    summary.metrics["oracle_validated"] = valid ? 1.0 : 0.0;
    if (valid) {
      const Snapshot& last = res.snapshots.back();
      const std::size_t stride = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(0.05 / grid.dr)));
      double num = 0.0, den = 0.0;
      std::size_t count = 0;
      auto cmp = art.open("oracle_compare.csv");
      cmp << "r,u_fd,v_oracle\n";
      for (std::size_t jn = 0; jn < grid.n && grid.r(jn) <= 8.0;
           jn += stride) {
        const double r = grid.r(jn);
        const double v = oracle(last.t, r);
        cmp << fmt(r) << ',' << fmt(last.u[jn]) << ',' << fmt(v) << "\n";
        num += (last.u[jn] - v) * (last.u[jn] - v) * r * r;
        den += v * v * r * r;
        ++count;
      }
      summary.metrics["oracle_rel_l2"] =
          den > 0 ? std::sqrt(num / den) : 0.0;
      summary.metrics["oracle_points"] = double(count);
    }
  }

  if (cfg.output.json) {
    auto os = art.open("summary.json");
    os << summary_json(summary).dump(2) << "\n";
  }
  return summary;
}

}  // namespace

int sweep_thread_cap() {
  if (const char* env = std::getenv("NULLWAVE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

RunSummary run_scenario(const ScenarioConfig& cfg,
                        const std::string& out_dir_override) {
  ScenarioConfig c = cfg;
  validate_config(c);
  if (c.scenario == ScenarioKind::EpsilonSweep)
    return run_epsilon_sweep(c, out_dir_override);
  if (c.scenario == ScenarioKind::ConvergenceStudy)
    return run_convergence_study(c, out_dir_override);

  Artifacts art;
  art.dir = out_dir_override.empty() ? fs::path(c.output.dir)
                                     : fs::path(out_dir_override);
  fs::create_directories(art.dir);

  RunSummary summary;
  if (c.scenario == ScenarioKind::Linear3d) {
    summary = run_3d_scenario(c, art.dir.string(), art.files);
  } else {
    summary = evolve_scenario(c, art);
  }
  summary.out_dir = art.dir.string();
  summary.manifest = art.files;
  finalize_manifest(art, summary);
  return summary;
}

RunSummary run_epsilon_sweep(const ScenarioConfig& cfg,
                             const std::string& out_dir_override) {
  Artifacts art;
  art.dir = out_dir_override.empty() ? fs::path(cfg.output.dir)
                                     : fs::path(out_dir_override);
  fs::create_directories(art.dir);

  RunSummary summary;
  summary.scenario = scenario_name(cfg.scenario);
  summary.out_dir = art.dir.string();

  std::vector<RunSummary> results(cfg.epsilons.size());
  std::vector<ScenarioConfig> configs;
  for (double eps : cfg.epsilons) {
    ScenarioConfig c = cfg;
    c.scenario = cfg.scenario == ScenarioKind::EpsilonSweep
                     ? ScenarioKind::ChaplyginRadial
                     : cfg.scenario;
    c.data.epsilon = eps;
    configs.push_back(std::move(c));
  }

  const int cap = std::min<int>(sweep_thread_cap(), int(configs.size()));
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t k;
      {
        std::lock_guard lock(mu);
        if (next >= configs.size()) return;
        k = next++;
      }
      char sub[48];
      std::snprintf(sub, sizeof sub, "eps_%g", configs[k].data.epsilon);
      results[k] = run_scenario(configs[k], (art.dir / sub).string());
    }
  };
  if (cap <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < cap; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Log-log slope of sup_t D against epsilon.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t npts = 0;
  json runs = json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    json r = summary_json(results[k]);
    r["epsilon"] = cfg.epsilons[k];
    runs.push_back(r);
    summary.exit_code = std::max(summary.exit_code, results[k].exit_code);
    if (results[k].sup_envelope > 0) {
      const double x = std::log(cfg.epsilons[k]);
      const double y = std::log(results[k].sup_envelope);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++npts;
    }
  }
  if (npts >= 2) {
    const double n = double(npts);
    summary.metrics["envelope_slope"] =
        (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  {
    auto os = art.open("sweep_summary.json");
    json j = summary_json(summary);
    j["runs"] = runs;
    os << j.dump(2) << "\n";
  }
  summary.manifest = art.files;
  finalize_manifest(art, summary);
  return summary;
}

RunSummary run_convergence_study(const ScenarioConfig& cfg,
                                 const std::string& out_dir_override) {
  Artifacts art;
  art.dir = out_dir_override.empty() ? fs::path(cfg.output.dir)
                                     : fs::path(out_dir_override);
  fs::create_directories(art.dir);

  RunSummary summary;
  summary.scenario = scenario_name(cfg.scenario);
  summary.out_dir = art.dir.string();

  ManufacturedSolution ms;
  ms.r_min = cfg.obstacle.b;
  ms.profile = Bump{cfg.data.center, cfg.data.width, 1.0};

  std::vector<double> errors(cfg.drs.size(), 0.0);
  const int cap = std::min<int>(sweep_thread_cap(), int(cfg.drs.size()));
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t k;
      {
        std::lock_guard lock(mu);
        if (next >= cfg.drs.size()) return;
        k = next++;
      }
      ScenarioConfig c = cfg;
      c.grid.dr = cfg.drs[k];
      const RadialGrid grid = c.build_grid();
      EvolveOptions opts;
      opts.t_final = c.t_final;
      opts.cfl = c.grid.cfl;
      opts.sample_every = 1e300;  // errors only
      opts.forcing = [&ms](double t, double r) { return ms.forcing(t, r); };
      const InitialData data = ms.initial_data(grid);
      const RunResult res =
          evolve(grid, NullFormSpec::zero(), data, opts);
      const Snapshot& last = res.snapshots.back();
      Field diff(grid.n), exact(grid.n);
      for (std::size_t j = 0; j < grid.n; ++j) {
        exact[j] = ms.value(last.t, grid.r(j));
        diff[j] = last.u[j] - exact[j];
      }
      errors[k] = l2_norm(grid, diff) / l2_norm(grid, exact);
    }
  };
  if (cap <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < cap; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double order = std::log(errors[k] / errors[k + 1]) /
                         std::log(cfg.drs[k] / cfg.drs[k + 1]);
    summary.convergence_orders.push_back(order);
  }
  {
    auto os = art.open("convergence.json");
    json j;
    j["drs"] = cfg.drs;
    j["l2_errors"] = errors;
    j["orders"] = summary.convergence_orders;
    os << j.dump(2) << "\n";
  }
  for (std::size_t k = 0; k < errors.size(); ++k)
    summary.metrics["error_dr_" + std::to_string(k)] = errors[k];
  summary.manifest = art.files;
  finalize_manifest(art, summary);
  return summary;
}

ContrastReport compare_null_vs_nonnull(double epsilon, double t_final,
                                       const ScenarioConfig* base) {
  if (!(epsilon >= 0.0 && epsilon <= 0.2))
    throw ConfigError("epsilon", "contrast experiment expects 0 <= eps <= 0.2");
  ScenarioConfig cfg;
  if (base) cfg = *base;
  cfg.data.epsilon = epsilon;
  cfg.t_final = t_final;

  ContrastReport rep;
  if (epsilon == 0.0) {
    rep.degenerate = true;
    return rep;
  }

  ScenarioConfig null_cfg = cfg;
  null_cfg.scenario = ScenarioKind::NullRadial;
  null_cfg.nonlinearity.preset = NonlinearityConfig::Preset::NullQ0;
  null_cfg.nonlinearity.specified = true;
  ScenarioConfig non_cfg = cfg;
  non_cfg.scenario = ScenarioKind::NonnullRadial;
  non_cfg.nonlinearity.preset = NonlinearityConfig::Preset::NonnullDt2;
  non_cfg.nonlinearity.specified = true;

  const fs::path out = fs::path(cfg.output.dir);
  rep.null_run = run_scenario(null_cfg, (out / "null_q0").string());
  rep.nonnull_run = run_scenario(non_cfg, (out / "nonnull_dt2").string());
  if (rep.null_run.exit_code == 4 && rep.nonnull_run.exit_code == 4)
    throw DivergenceError(t_final, "both contrast runs failed numerically");

  rep.null_amplification = rep.null_run.amplification;
  rep.nonnull_amplification = rep.nonnull_run.amplification;
  rep.nonnull_blowup = rep.nonnull_run.exit_code == 2;
  rep.ratio = rep.null_amplification > 0
                  ? rep.nonnull_amplification / rep.null_amplification
                  : 0.0;
  return rep;
}

}  // namespace nullwave
