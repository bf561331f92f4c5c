#include "nullwave/solver3d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "nullwave/chaplygin.hpp"
#include "nullwave/errors.hpp"
#include "nullwave/initial.hpp"
#include "nullwave/solver.hpp"

namespace nullwave {

namespace {

constexpr double kPi = std::numbers::pi;

// Per-node operator coefficients in the local spherical frame at y.
struct Coeffs {
  // A' = frame components of J J^T; B' = frame components of Lap_x y.
  std::vector<double> a_rr, a_tt, a_pp, a_rt, a_rp, a_tp;
  std::vector<double> b_r, b_t, b_p;
  std::vector<double> det_j;      // Jacobian determinant at the node
  std::vector<double> r_phys;     // |x(y)|
  // Boundary condition m . grad v = 0 at rho = 1, frame components.
  std::vector<double> m_r, m_t, m_p;  // sized nth * nph
  double min_det = 1e300;
};

Vec3 unit_from_angles(double th, double ph) {
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
          std::cos(th)};
}

Coeffs assemble_coeffs(const FlattenMap& map, const Grid3D& g) {
  Coeffs c;
  const std::size_t n = g.size();
  c.a_rr.assign(n, 1.0);
  c.a_tt.assign(n, 1.0);
  c.a_pp.assign(n, 1.0);
  c.a_rt.assign(n, 0.0);
  c.a_rp.assign(n, 0.0);
  c.a_tp.assign(n, 0.0);
  c.b_r.assign(n, 0.0);
  c.b_t.assign(n, 0.0);
  c.b_p.assign(n, 0.0);
  c.det_j.assign(n, 1.0);
  c.r_phys.assign(n, 0.0);
  c.m_r.assign(g.nth * g.nph, 1.0);
  c.m_t.assign(g.nth * g.nph, 0.0);
  c.m_p.assign(g.nth * g.nph, 0.0);

  for (std::size_t j = 0; j < g.nth; ++j) {
    const double th = g.theta(j);
    const double st = std::sin(th), ct = std::cos(th);
    for (std::size_t k = 0; k < g.nph; ++k) {
      const double ph = g.phi(k);
      const double sp = std::sin(ph), cp = std::cos(ph);
      const Vec3 e_r{st * cp, st * sp, ct};
      const Vec3 e_t{ct * cp, ct * sp, -st};
      const Vec3 e_p{-sp, cp, 0.0};
      for (std::size_t i = 0; i < g.nr; ++i) {
        const std::size_t id = g.idx(i, j, k);
        const double rho = g.rho(i);
        const Vec3 y = scale(e_r, rho);
        const Vec3 x = map.inverse(y);
        c.r_phys[id] = norm(x);
        if (norm(x) >= 3.0) continue;  // identity region defaults hold
        const Mat3 jac = map.jacobian(x);
        c.det_j[id] = det3(jac);
        c.min_det = std::min(c.min_det, c.det_j[id]);
        // A = J J^T in Cartesian components.
        Mat3 a{};
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) {
            double s = 0.0;
            for (int m = 0; m < 3; ++m) s += jac[p][m] * jac[q][m];
            a[p][q] = s;
          }
        const Vec3 b = map.map_laplacian(x);
        const Vec3 ar = matvec(a, e_r), at = matvec(a, e_t), ap = matvec(a, e_p);
        c.a_rr[id] = dot(e_r, ar);
        c.a_tt[id] = dot(e_t, at);
        c.a_pp[id] = dot(e_p, ap);
        c.a_rt[id] = dot(e_r, at);
        c.a_rp[id] = dot(e_r, ap);
        c.a_tp[id] = dot(e_t, ap);
        c.b_r[id] = dot(b, e_r);
        c.b_t[id] = dot(b, e_t);
        c.b_p[id] = dot(b, e_p);
        if (i == 0) {
          // m = J^T nu at the mapped surface point.
          const Vec3 omega = normalized(x);
          const Vec3 nu = map.shape().outward_normal(omega);
          Vec3 m{};
          for (int q = 0; q < 3; ++q)
            for (int p = 0; p < 3; ++p) m[q] += jac[q][p] * nu[p];
          const double mn = norm(m);
          c.m_r[j * g.nph + k] = dot(m, e_r) / mn;
          c.m_t[j * g.nph + k] = dot(m, e_t) / mn;
          c.m_p[j * g.nph + k] = dot(m, e_p) / mn;
        }
      }
    }
  }
  if (c.min_det == 1e300) c.min_det = 1.0;
  return c;
}

}  // namespace

double Grid3D::theta(std::size_t j) const {
  return (double(j) + 0.5) * kPi / double(nth);
}

double Grid3D::phi(std::size_t k) const {
  return double(k) * 2.0 * kPi / double(nph);
}

Result3D run_3d_linear(const ObstacleShape& shape, const Options3D& opts) {
  Grid3D g;
  g.nr = opts.nr;
  g.nth = opts.nth;
  g.nph = opts.nph;
  if (g.nph % 2 != 0)
    throw ConfigError("grid3d.nph", "must be even for the pole ghost");
  g.drho = (opts.y_max - 1.0) / double(g.nr - 1);
  const double dth = kPi / double(g.nth);
  const double dph = 2.0 * kPi / double(g.nph);

  const FlattenMap map(shape);
  const Coeffs coef = assemble_coeffs(map, g);

  // CFL bound from the finest effective spacing; the wave speed through the
  // collar is bounded by sqrt(max eigenvalue of A) <= sqrt(a_rr + a_tt + a_pp).
  double max_speed2 = 0.0;
  for (std::size_t id = 0; id < g.size(); ++id)
    max_speed2 = std::max(
        max_speed2, coef.a_rr[id] + coef.a_tt[id] + coef.a_pp[id]);
  const double min_angular =
      1.0 * std::sin(0.5 * dth) * dph;  // phi spacing at the pole ring, rho=1
  const double h_min = std::min({g.drho, 1.0 * dth, min_angular});
  const double dt_bound = opts.cfl * h_min / std::sqrt(max_speed2);
  double dt = opts.dt;
  if (dt <= 0.0) {
    dt = dt_bound;
  } else if (dt > dt_bound) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "dt violates the angular CFL bound; need dt <= %.6g",
                  dt_bound);
    throw ConfigError("grid3d.dt", msg);
  }

  Result3D res;
  res.grid = g;
  res.dt = dt;
  res.min_jacobian_det = coef.min_det;

  // Initial data: radial bumps in the physical radius, optional angular
  // modulation.
  const Bump b0{opts.data.center, opts.data.width, opts.data.u0_amp};
  const Bump b1{opts.data.center, opts.data.width, opts.data.u1_amp};
  const double eps = opts.data.epsilon;
  Field3 v(g.size(), 0.0), v_prev(g.size(), 0.0), v_next(g.size(), 0.0);
  Field3 vt0(g.size(), 0.0);
  for (std::size_t i = 0; i < g.nr; ++i)
    for (std::size_t j = 0; j < g.nth; ++j)
      for (std::size_t k = 0; k < g.nph; ++k) {
        const std::size_t id = g.idx(i, j, k);
        const double r = coef.r_phys[id];
        const double ang =
            opts.angular_profile ? opts.angular_profile(g.theta(j), g.phi(k))
                                 : 1.0;
        v[id] = eps * ang * b0.value(r);
        vt0[id] = eps * ang * b1.value(r);
      }

  const std::size_t pole_shift = g.nph / 2;
  // Value with pole and boundary ghosts resolved; i may be -1 (inner ghost
  // handled by the caller) or nr (zero).
  auto at = [&](const Field3& f, long i, long j, long k) -> double {
    if (i >= long(g.nr)) return 0.0;
    if (j < 0) {
      j = 0;
      k = long((std::size_t(k + long(g.nph)) + pole_shift) % g.nph);
    } else if (j >= long(g.nth)) {
      j = long(g.nth) - 1;
      k = long((std::size_t(k + long(g.nph)) + pole_shift) % g.nph);
    }
    k = (k % long(g.nph) + long(g.nph)) % long(g.nph);
    return f[g.idx(std::size_t(i), std::size_t(j), std::size_t(k))];
  };

  // Inner radial ghost from the flattened Neumann condition.
  auto inner_ghost = [&](const Field3& f, long j, long k) -> double {
    const std::size_t s = std::size_t(j) * g.nph + std::size_t(k);
    const double vt =
        (at(f, 0, j + 1, k) - at(f, 0, j - 1, k)) / (2.0 * dth);
    const double st = std::sin(g.theta(std::size_t(j)));
    const double vp = (at(f, 0, j, k + 1) - at(f, 0, j, k - 1)) / (2.0 * dph);
    const double drho_v =
        -(coef.m_t[s] * vt / 1.0 + coef.m_p[s] * vp / (1.0 * st)) /
        coef.m_r[s];
    return at(f, 1, j, k) - 2.0 * g.drho * drho_v;
  };

  // Apply the spatial operator A:Hess + B.grad to a level.
  auto apply_op = [&](const Field3& f, double t, Field3& out) {
    for (std::size_t j = 0; j < g.nth; ++j) {
      const double th = g.theta(j);
      const double st = std::sin(th), cot = std::cos(th) / st;
      const long lj = long(j);
      for (std::size_t k = 0; k < g.nph; ++k) {
        const long lk = long(k);
        const double ghost =
            inner_ghost(f, lj, lk);  // used only at i = 0
        for (std::size_t i = 0; i + 1 < g.nr; ++i) {
          const std::size_t id = g.idx(i, j, k);
          const double rho = g.rho(i);
          const long li = long(i);
          const double fc = f[id];
          const double fim = i == 0 ? ghost : at(f, li - 1, lj, lk);
          const double fip = at(f, li + 1, lj, lk);
          const double fjm = at(f, li, lj - 1, lk);
          const double fjp = at(f, li, lj + 1, lk);
          const double fkm = at(f, li, lj, lk - 1);
          const double fkp = at(f, li, lj, lk + 1);
          const double vr = (fip - fim) / (2.0 * g.drho);
          const double vth = (fjp - fjm) / (2.0 * dth);
          const double vph = (fkp - fkm) / (2.0 * dph);
          const double vrr = (fip - 2.0 * fc + fim) / (g.drho * g.drho);
          const double vtt = (fjp - 2.0 * fc + fjm) / (dth * dth);
          const double vpp = (fkp - 2.0 * fc + fkm) / (dph * dph);
          double vrt = 0.0, vrp = 0.0, vtp = 0.0;
          if (coef.a_rt[id] != 0.0 || coef.a_rp[id] != 0.0 ||
              coef.a_tp[id] != 0.0) {
            const double frtm = i == 0 ? fjm : at(f, li - 1, lj - 1, lk);
            const double frtp = at(f, li + 1, lj + 1, lk);
            const double frtpm = at(f, li + 1, lj - 1, lk);
            const double frtmp = i == 0 ? fjp : at(f, li - 1, lj + 1, lk);
            vrt = (frtp - frtpm - frtmp + frtm) / (4.0 * g.drho * dth);
            const double frpm = i == 0 ? fkm : at(f, li - 1, lj, lk - 1);
            const double frpp = at(f, li + 1, lj, lk + 1);
            const double frppm = at(f, li + 1, lj, lk - 1);
            const double frpmp = i == 0 ? fkp : at(f, li - 1, lj, lk + 1);
            vrp = (frpp - frppm - frpmp + frpm) / (4.0 * g.drho * dph);
            const double ftpm = at(f, li, lj - 1, lk - 1);
            const double ftpp = at(f, li, lj + 1, lk + 1);
            const double ftppm = at(f, li, lj + 1, lk - 1);
            const double ftpmp = at(f, li, lj - 1, lk + 1);
            vtp = (ftpp - ftppm - ftpmp + ftpm) / (4.0 * dth * dph);
          }
          // Orthonormal-frame Hessian components in spherical coordinates.
          const double rho2 = rho * rho;
          const double h_rr = vrr;
          const double h_tt = vtt / rho2 + vr / rho;
          const double h_pp = vpp / (rho2 * st * st) + vr / rho +
                              cot * vth / rho2;
          const double h_rt = vrt / rho - vth / rho2;
          const double h_rp = vrp / (rho * st) - vph / (rho2 * st);
          const double h_tp = vtp / (rho2 * st) - cot * vph / (rho2 * st);
          double val = coef.a_rr[id] * h_rr + coef.a_tt[id] * h_tt +
                       coef.a_pp[id] * h_pp +
                       2.0 * (coef.a_rt[id] * h_rt + coef.a_rp[id] * h_rp +
                              coef.a_tp[id] * h_tp);
          val += coef.b_r[id] * vr + coef.b_t[id] * vth / rho +
                 coef.b_p[id] * vph / (rho * st);
          if (opts.forcing) val += opts.forcing(t, coef.r_phys[id]);
          out[id] = val;
        }
        out[g.idx(g.nr - 1, j, k)] = 0.0;  // domain-of-dependence closure
      }
    }
  };

  // Leapfrog cold start: v(-dt) = v0 - dt v1 + dt^2/2 (L v0 + F).
  apply_op(v, 0.0, v_next);
  for (std::size_t id = 0; id < g.size(); ++id)
    v_prev[id] = v[id] - dt * vt0[id] + 0.5 * dt * dt * v_next[id];

  auto energy = [&](const Field3& cur, const Field3& prev, double tdt) {
    (void)tdt;
    double e = 0.0;
    for (std::size_t j = 0; j < g.nth; ++j) {
      const double st = std::sin(g.theta(j));
      for (std::size_t k = 0; k < g.nph; ++k)
        for (std::size_t i = 0; i + 1 < g.nr; ++i) {
          const std::size_t id = g.idx(i, j, k);
          const double rho = g.rho(i);
          const long li = long(i), lj = long(j), lk = long(k);
          const double vt = (cur[id] - prev[id]) / dt;
          const double fim =
              i == 0 ? inner_ghost(cur, lj, lk) : at(cur, li - 1, lj, lk);
          const double vr = (at(cur, li + 1, lj, lk) - fim) / (2.0 * g.drho);
          const double vth =
              (at(cur, li, lj + 1, lk) - at(cur, li, lj - 1, lk)) /
              (2.0 * dth) / rho;
          const double vph =
              (at(cur, li, lj, lk + 1) - at(cur, li, lj, lk - 1)) /
              (2.0 * dph) / (rho * st);
          // |grad_x v|^2 = grad' . A' grad' in the frame.
          const double gx =
              coef.a_rr[id] * vr * vr + coef.a_tt[id] * vth * vth +
              coef.a_pp[id] * vph * vph +
              2.0 * (coef.a_rt[id] * vr * vth + coef.a_rp[id] * vr * vph +
                     coef.a_tp[id] * vth * vph);
          const double w = rho * rho * st / coef.det_j[id];
          e += (vt * vt + gx) * w;
        }
    }
    return e * g.drho * dth * dph;
  };

  const auto n_steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opts.t_final / dt)));
  double t = 0.0;
  double next_sample = 0.0;
  for (std::size_t m = 0; m <= n_steps; ++m) {
    if (m > 0) {
      apply_op(v, t, v_next);
      for (std::size_t id = 0; id < g.size(); ++id)
        v_next[id] = 2.0 * v[id] - v_prev[id] + dt * dt * v_next[id];
      std::swap(v_prev, v);
      std::swap(v, v_next);
      t += dt;
    }
    if (t + 1e-12 >= next_sample || m == n_steps) {
      const double e = energy(v, v_prev, t);
      if (!std::isfinite(e)) {
        res.finite = false;
        break;
      }
      res.energy_track.emplace_back(t, e);
      double env = 0.0;
      for (std::size_t id = 0; id < g.size(); ++id) {
        const double vt = (v[id] - v_prev[id]) / dt;
        env = std::max(env, (1.0 + t + coef.r_phys[id]) *
                                (std::abs(v[id]) + std::abs(vt)));
      }
      res.envelope_max = std::max(res.envelope_max, env);
      while (next_sample <= t + 1e-12) next_sample += opts.sample_every;
    }
  }
  res.t_final = t;

  // Spherical mean of the final level per radial shell.
  res.radial_mean.assign(g.nr, 0.0);
  for (std::size_t i = 0; i < g.nr; ++i) {
    double acc = 0.0, wsum = 0.0;
    for (std::size_t j = 0; j < g.nth; ++j) {
      const double w = std::sin(g.theta(j));
      for (std::size_t k = 0; k < g.nph; ++k) {
        acc += w * v[g.idx(i, j, k)];
        wsum += w;
      }
    }
    res.radial_mean[i] = acc / wsum;
  }
  res.v = std::move(v);
  res.v_prev = std::move(v_prev);
  return res;
}

RunSummary run_3d_scenario(const ScenarioConfig& cfg,
                           const std::string& out_dir,
                           std::vector<std::string>& files) {
  namespace fs = std::filesystem;
  RunSummary summary;
  summary.scenario = scenario_name(cfg.scenario);
  summary.out_dir = out_dir;

  const ObstacleShape shape = cfg.obstacle.build();
  Options3D opts;
  opts.t_final = cfg.t_final;
  opts.cfl = cfg.grid.cfl;
  opts.data = cfg.data;
  opts.forcing = cfg.forcing.build();
  opts.y_max = cfg.grid.r_max > 0 ? cfg.grid.r_max : cfg.auto_r_max();

  const Result3D r3 = run_3d_linear(shape, opts);
  summary.metrics["min_jacobian_det"] = r3.min_jacobian_det;
  summary.metrics["envelope_max"] = r3.envelope_max;
  if (!r3.finite) summary.exit_code = 2;

  {
    std::ofstream os(fs::path(out_dir) / "energy3d.csv");
    files.push_back("energy3d.csv");
    os << "t,energy\n";
    for (const auto& [t, e] : r3.energy_track) os << t << ',' << e << "\n";
    if (!r3.energy_track.empty()) {
      summary.metrics["energy_initial"] = r3.energy_track.front().second;
      double emax = 0.0;
      for (const auto& [t, e] : r3.energy_track) emax = std::max(emax, e);
      summary.metrics["energy_max"] = emax;
    }
  }

  // Radial cross-check against the production radial solver at matched
  // coarse resolution (ball obstacle, spherically symmetric data).
  if (cfg.obstacle.kind == ObstacleConfig::Kind::Ball) {
    const FlattenMap map(shape);
    RadialGrid rg = RadialGrid::make(
        shape.base(), opts.y_max + 1.0, r3.grid.drho);
    const InitialData data = make_bump_data(rg, shape.max_b(), cfg.data);
    EvolveOptions eopts;
    eopts.t_final = cfg.t_final;
    // Match the 3-D step so the leapfrog truncation constants align and the
    // comparison measures the spatial schemes.
    eopts.cfl = std::min(0.5, r3.dt / rg.dr);
    eopts.sample_every = 1e300;
    eopts.forcing = opts.forcing;
    const RunResult rad = evolve(rg, NullFormSpec::zero(), data, eopts);
    const Snapshot& last = rad.snapshots.back();

    // Interpolate the radial solution at the mapped physical radii and
    // compare with the spherical mean of the 3-D run.
    double num = 0.0, den = 0.0;
    std::ofstream os(fs::path(out_dir) / "radial_check.csv");
    files.push_back("radial_check.csv");
    os << "rho,r_phys,v3d_mean,u_radial\n";
    for (std::size_t i = 0; i + 1 < r3.grid.nr; ++i) {
      const double rho = r3.grid.rho(i);
      const Vec3 omega{0, 0, 1};
      const double r = map.inverse_radius(rho, omega);
      const double pos = (r - rg.r_min) / rg.dr;
      const auto j0 = std::min(std::size_t(pos), rg.n - 2);
      const double fr = pos - double(j0);
      const double u_rad = last.u[j0] * (1.0 - fr) + last.u[j0 + 1] * fr;
      const double v3 = r3.radial_mean[i];
      os << rho << ',' << r << ',' << v3 << ',' << u_rad << "\n";
      num += (v3 - u_rad) * (v3 - u_rad) * r * r;
      den += u_rad * u_rad * r * r;
    }
    summary.metrics["radial_check_rel_l2"] =
        den > 0 ? std::sqrt(num / den) : 0.0;
  }
  return summary;
}

}  // namespace nullwave
