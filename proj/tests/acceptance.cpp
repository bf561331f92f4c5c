// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "nullwave/chaplygin.hpp"
#include "nullwave/oracle.hpp"
#include "nullwave/runner.hpp"
#include "nullwave/sampling.hpp"
#include "nullwave/solver3d.hpp"

using namespace nullwave;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// 1. Radial FD vs the explicit quadrature formula, dr = 1/200, t = 10,
//    relative L2 <= 1e-3, after mandatory residual validation; < 1 min.
void criterion_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const Bump br{3.0, 1.0, 1.0};
  const Bump bt{1.0, 1.0, 1.0};
  SphericalOracleProblem prob;
  prob.f1 = [=](double t, double r) { return bt.value(t) * br.value(r); };
  prob.f1_r_lo = 2.0;
  prob.f1_r_hi = 4.0;
  prob.f1_t_hi = 2.0;
  prob.quad_step = 0.005;
  const SphericalOracle oracle(prob);

  const auto v1 = oracle.validate(4.0, 6.0, 1.5, 3.0, 0.1, 3, 4);
  const auto v2 = oracle.validate(4.0, 6.0, 1.5, 3.0, 0.05, 3, 4);
  const bool validated = v2.pde < 0.5 * v1.pde + 1e-9 && v2.bc < 2e-3;

  const double dr = 1.0 / 200.0;
  const RadialGrid grid = RadialGrid::make(1.0, 18.0, dr);
  EvolveOptions opts;
  opts.t_final = 10.0;
  opts.sample_every = 1e300;
  opts.forcing = prob.f1;
  const auto data = make_bump_data(grid, 1.0, {3.0, 1.0, 0.0, 0.0, 0.0});
  const auto res = evolve(grid, NullFormSpec::zero(), data, opts);
  const Snapshot& last = res.snapshots.back();

  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < grid.n; j += 10) {
    const double r = grid.r(j);
    if (r > 8.0) break;
    const double v = oracle(last.t, r);
    num += (last.u[j] - v) * (last.u[j] - v) * r * r;
    den += v * v * r * r;
  }
  const double rel = std::sqrt(num / den);
  const double secs = wall_seconds(t0);
  report(1, "oracle equivalence",
         validated && rel <= 1e-3 && secs < 60.0,
         fmt("validated=%d rel_l2=%.3e (tol 1e-3) runtime=%.1fs", validated,
             rel, secs));
}

// 2. Manufactured-solution L2 convergence rate 2.0 +- 0.3 across
//    dr in {1/50, 1/100, 1/200}.
void criterion_convergence() {
  ScenarioConfig cfg;
  cfg.scenario = ScenarioKind::ConvergenceStudy;
  cfg.t_final = 10.0;
  cfg.drs = {1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0};
  cfg.output.dir = "acceptance_out/convergence";
  const auto summary = run_convergence_study(cfg);
  bool pass = summary.convergence_orders.size() == 2;
  std::string detail = "orders:";
  for (double o : summary.convergence_orders) {
    pass = pass && o >= 1.7 && o <= 2.3;
    detail += fmt(" %.3f", o);
  }
  report(2, "convergence order", pass, detail + " (2.0 +- 0.3)");
}

// 3. Homogeneous linear Neumann run: relative E00 drift <= 1e-3 on [0, 50]
//    at dr = 1/200.
void criterion_energy_conservation() {
  const RadialGrid grid = RadialGrid::make(0.875, 67.0, 1.0 / 200.0);
  const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 0.0, 0.01});
  EvolveOptions opts;
  opts.t_final = 50.0;
  opts.sample_every = 1.0;
  const auto res = evolve(grid, NullFormSpec::zero(), data, opts);
  const double e0 = res.report.rows.front().e0_integral;
  double drift = 0.0;
  for (const auto& row : res.report.rows)
    drift = std::max(drift, std::abs(row.e0_integral - e0) / e0);
  report(3, "energy conservation", drift <= 1e-3,
         fmt("max relative drift %.3e (tol 1e-3)", drift));
}

// 4. Exponential local-energy decay: fitted c > 0 with R^2 >= 0.95 on
//    t in [5, 40]; c stable within 10% across two resolutions.
void criterion_local_energy_decay() {
  auto fit_at = [&](double dr) {
    const RadialGrid grid = RadialGrid::make(0.875, 55.0, dr);
    const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 0.0, 0.01});
    EvolveOptions opts;
    opts.t_final = 40.0;
    opts.sample_every = 0.5;
    const auto res = evolve(grid, NullFormSpec::zero(), data, opts);
    return local_energy_decay_fit(res.report, 5.0);
  };
  const auto f1 = fit_at(1.0 / 100.0);
  const auto f2 = fit_at(1.0 / 200.0);
  const double dev = std::abs(f1.rate - f2.rate) / f2.rate;
  const bool pass = !f1.degenerate && !f2.degenerate && f2.rate > 0.0 &&
                    f2.r_squared >= 0.95 && dev <= 0.10;
  report(4, "local energy decay", pass,
         fmt("c=%.4f R2=%.4f resolution dev=%.1f%% (tol 10%%)", f2.rate,
             f2.r_squared, 100.0 * dev));
}

// 5. Hardy inequality on 20 randomized compactly supported fields.
void criterion_hardy() {
  const RadialGrid grid = RadialGrid::make(0.875, 14.0, 0.005);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uc(1.8, 9.0), uw(0.3, 2.0),
      ua(-2.0, 2.0);
  double worst = 0.0;
  int degenerate = 0;
  for (int k = 0; k < 20; ++k) {
    Field v(grid.n, 0.0);
    for (int b = 0; b < 3; ++b) {
      const Bump bump{uc(rng), uw(rng), ua(rng)};
      for (std::size_t j = 0; j < grid.n; ++j) v[j] += bump.value(grid.r(j));
    }
    const auto res = hardy_check(grid, v);
    if (res.degenerate) {
      ++degenerate;
      continue;
    }
    worst = std::max(worst, res.ratio);
  }
  report(5, "hardy inequality", worst <= 2.0 && degenerate == 0,
         fmt("worst ratio %.4f (bound 2)", worst));
}

// 6. Structural checkers: chaplygin passes both; S^{00}-only fails the null
//    check with a witness; a normal-coupling Q fails admissibility.
void criterion_structural() {
  const auto shape = ObstacleShape::ball(7.0 / 8.0);
  const auto chap = chaplygin_spec();
  const auto vn = check_null(chap, 1e-12, 256);
  const auto va = check_admissible(chap, shape, 1e-12, 256);

  const auto bad_null = check_null(nonnull_dt2_spec(), 1e-12, 256);
  const bool witness_ok =
      !bad_null.holds &&
      std::abs(nonnull_dt2_spec().s_symbol(bad_null.witness_omega)) > 1e-6;

  QTensor q{};
  q[1][1][0] = 1.0;
  const auto bad_adm = check_admissible(NullFormSpec(Mat4{}, q), shape);
  const bool pass = vn.holds && vn.max_residual <= 1e-12 && va.holds &&
                    va.max_residual <= 1e-12 && witness_ok && !bad_adm.holds;
  report(6, "structural checkers", pass,
         fmt("chaplygin null res=%.1e adm res=%.1e; witnesses found=%d",
             vn.max_residual, va.max_residual,
             witness_ok && !bad_adm.holds));
}

// 7. Chaplygin window stability: eps in {0.02, 0.01, 0.005} run to t = 100
//    with no blowup, rho_min > A/P0, envelope slope 1.0 +- 0.25.
void criterion_small_data_decay() {
  ScenarioConfig cfg;
  cfg.scenario = ScenarioKind::EpsilonSweep;
  cfg.epsilons = {0.02, 0.01, 0.005};
  cfg.t_final = 100.0;
  cfg.grid.dr = 0.01;
  cfg.data = {3.0, 1.0, 1.0, 1.0, 0.01};
  cfg.diagnostics.sample_every = 0.5;
  cfg.output.dir = "acceptance_out/eps_sweep";
  const auto summary = run_epsilon_sweep(cfg);
  const double slope = summary.metrics.count("envelope_slope")
                           ? summary.metrics.at("envelope_slope")
                           : 0.0;
  const bool pass = summary.exit_code == 0 && std::abs(slope - 1.0) <= 0.25;
  report(7, "small-data decay (chaplygin)", pass,
         fmt("exit=%d envelope log-log slope=%.3f (1.0 +- 0.25)",
             summary.exit_code, slope));
}

// 8. Null vs non-null dichotomy at eps = 0.1, t = 100: the non-null run
//    blows up or amplifies >= 2x the null run; the null run stays <= 2.
void criterion_dichotomy() {
  // Identical data for both runs; the amplitude sits above the non-null
  // blowup threshold at this resolution while the null run's transient
  // (wall focusing + doubling) stays under 2.
  ScenarioConfig base;
  base.data = {1.5, 0.5, 0.0, 18.0, 0.1};
  base.grid.dr = 0.01;
  base.diagnostics.sample_every = 1.0;
  base.output.dir = "acceptance_out/contrast";
  const auto rep = compare_null_vs_nonnull(0.1, 100.0, &base);
  const bool nonnull_ok = rep.nonnull_blowup || rep.ratio >= 2.0;
  const bool null_ok = rep.null_amplification <= 2.0;
  report(8, "null vs non-null dichotomy", nonnull_ok && null_ok,
         fmt("null amp=%.2f nonnull amp=%.2f blowup=%d ratio=%.2f",
             rep.null_amplification, rep.nonnull_amplification,
             rep.nonnull_blowup, rep.ratio));
}

// 9. KSS boundedness for a forced linear run: ratio at T = 100 exceeds the
//    T = 10 ratio by at most 50%.
void criterion_kss() {
  const RadialGrid grid = RadialGrid::make(0.875, 130.0, 0.01);
  const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 0.0, 0.0, 0.0});
  const Bump br{3.0, 1.0, 1.0};
  const Bump bt{1.0, 1.0, 1.0};
  EvolveOptions opts;
  opts.t_final = 100.0;
  opts.sample_every = 0.5;
  opts.forcing = [=](double t, double r) { return bt.value(t) * br.value(r); };
  const auto res = evolve(grid, NullFormSpec::zero(), data, opts);
  const auto r10 = kss_ratio_at(res.report, 10.0);
  const auto r100 = kss_ratio_at(res.report, 100.0);
  const bool pass = r10 && r100 && *r100 <= 1.5 * *r10;
  report(9, "KSS boundedness", pass,
         fmt("ratio(10)=%.4f ratio(100)=%.4f growth=%.2fx (tol 1.5x)",
             r10.value_or(0.0), r100.value_or(0.0),
             r10 && *r10 > 0 ? *r100 / *r10 : 0.0));
}

// 10. Linear 3-D flattened run vs the radial solver within 5% relative L2
//     at matched coarse resolution; Jacobian determinant positive.
void criterion_3d_cross_check() {
  ScenarioConfig cfg;
  cfg.scenario = ScenarioKind::Linear3d;
  cfg.t_final = 1.5;  // y_max sized automatically; 64 radial nodes
  cfg.data = {3.0, 1.0, 1.0, 0.0, 0.01};
  cfg.output.dir = "acceptance_out/linear3d";
  const auto summary = run_scenario(cfg);
  const double rel = summary.metrics.count("radial_check_rel_l2")
                         ? summary.metrics.at("radial_check_rel_l2")
                         : 1e300;
  const double det = summary.metrics.count("min_jacobian_det")
                         ? summary.metrics.at("min_jacobian_det")
                         : -1.0;
  report(10, "3-D / radial cross-check", rel <= 0.05 && det > 0.0,
         fmt("rel_l2=%.3e (tol 5e-2) min det=%.3f", rel, det));
}

}  // namespace

int main() {
  std::printf("nullwave acceptance suite\n");
  const auto t0 = std::chrono::steady_clock::now();
  criterion_oracle_equivalence();
  criterion_convergence();
  criterion_energy_conservation();
  criterion_local_energy_decay();
  criterion_hardy();
  criterion_structural();
  criterion_small_data_decay();
  criterion_dichotomy();
  criterion_kss();
  criterion_3d_cross_check();
  std::printf("%d/10 criteria passed in %.1fs\n", 10 - g_failures,
              wall_seconds(t0));
  return g_failures;
}
