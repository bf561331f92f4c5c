#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nullwave/errors.hpp"
#include "nullwave/solver.hpp"

using namespace nullwave;

namespace {

// Exact free outgoing solution w(r - t) / r of the radial wave operator.
struct Outgoing {
  Bump profile{6.0, 1.0, 1.0};
  double value(double t, double r) const { return profile.value(r - t) / r; }
};

// Independent 4th-order Runge-Kutta method-of-lines reference for one step
// of the chaplygin radial problem, with its own literal nonlinearity.
struct MolReference {
  const RadialGrid& grid;

  Field rhs(const Field& u, const Field& v) const {
    const Field ur = deriv_neumann(grid, u);
    const Field urr = deriv2_neumann(grid, u);
    const Field vr = deriv_neumann(grid, v);
    Field out(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double r = grid.r(j);
      const double lap = urr[j] + 2.0 * ur[j] / r;
      // Literal chaplygin right-hand side, radial contraction.
      const double nl = -2.0 * ur[j] * vr[j] - ur[j] * ur[j] * urr[j] +
                        (2.0 * v[j] + ur[j] * ur[j]) * lap;
      out[j] = lap + nl;
    }
    out[grid.n - 1] = 0.0;
    return out;
  }

  std::pair<Field, Field> step(Field u, Field v, double dt) const {
    auto axpy = [&](const Field& a, const Field& b, double s) {
      Field o(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) o[j] = a[j] + s * b[j];
      return o;
    };
    const Field k1u = v, k1v = rhs(u, v);
    const Field u2 = axpy(u, k1u, dt / 2), v2 = axpy(v, k1v, dt / 2);
    const Field k2u = v2, k2v = rhs(u2, v2);
    const Field u3 = axpy(u, k2u, dt / 2), v3 = axpy(v, k2v, dt / 2);
    const Field k3u = v3, k3v = rhs(u3, v3);
    const Field u4 = axpy(u, k3u, dt), v4 = axpy(v, k3v, dt);
    const Field k4u = v4, k4v = rhs(u4, v4);
    Field un(u.size()), vn(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      un[j] = u[j] + dt / 6.0 * (k1u[j] + 2 * k2u[j] + 2 * k3u[j] + k4u[j]);
      vn[j] = v[j] + dt / 6.0 * (k1v[j] + 2 * k2v[j] + 2 * k3v[j] + k4v[j]);
    }
    return {std::move(un), std::move(vn)};
  }
};

double free_wave_error(double dr, int steps) {
  const RadialGrid grid = RadialGrid::make(0.875, 20.0, dr);
  const Outgoing ex;
  FieldState st;
  st.dt = 0.5 * dr;
  st.t = 0.0;
  st.u_curr.resize(grid.n);
  st.u_prev.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    st.u_curr[j] = ex.value(0.0, grid.r(j));
    st.u_prev[j] = ex.value(-st.dt, grid.r(j));
  }
  const NullFormSpec spec = NullFormSpec::zero();
  for (int k = 0; k < steps; ++k) step(st, spec, grid);
  double err = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j)
    err = std::max(err, std::abs(st.u_curr[j] - ex.value(st.t, grid.r(j))));
  return err;
}

}  // namespace

TEST_CASE("zero state stays zero") {
  const RadialGrid grid = RadialGrid::make(0.875, 10.0, 0.01);
  FieldState st;
  st.u_curr.assign(grid.n, 0.0);
  st.u_prev.assign(grid.n, 0.0);
  st.dt = 0.005;
  step(st, chaplygin_spec(), grid);
  for (double v : st.u_curr) CHECK(v == 0.0);
  CHECK(st.t == doctest::Approx(0.005));
}

TEST_CASE("free outgoing profile advects at second order") {
  // Error at t = 1 drops ~4x when dr halves.
  const double e1 = free_wave_error(0.02, 100);
  const double e2 = free_wave_error(0.01, 200);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.5);
  CHECK(e2 < 2e-4);
}

TEST_CASE("one chaplygin step matches the RK4 method-of-lines reference") {
  const double dr = 0.01;
  const RadialGrid grid = RadialGrid::make(0.875, 8.0, dr);
  const auto spec = chaplygin_spec();
  const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 1.0, 0.01});
  const auto seq = build_psi2(data, spec, grid);
  const double dt = 0.5 * dr;

  FieldState st;
  st.dt = dt;
  st.u_curr = seq.psis[0];
  st.u_prev.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j)
    st.u_prev[j] = seq.psis[0][j] - dt * seq.psis[1][j] +
                   0.5 * dt * dt * seq.psis[2][j];
  step(st, spec, grid);
  CHECK(last_step_iterations() >= 1);
  CHECK(last_step_iterations() < 25);

  const MolReference mol{grid};
  const auto [u_ref, v_ref] = mol.step(seq.psis[0], seq.psis[1], dt);
  double err = 0.0;
  for (std::size_t j = 0; j + 1 < grid.n; ++j)
    err = std::max(err, std::abs(st.u_curr[j] - u_ref[j]));
  CHECK(err < 1e-6);
}

TEST_CASE("linear leapfrog is time-reversible") {
  const RadialGrid grid = RadialGrid::make(0.875, 12.0, 0.01);
  const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 0.0, 0.01});
  const auto seq = build_psi2(data, NullFormSpec::zero(), grid);
  const double dt = 0.005;

  FieldState st;
  st.dt = dt;
  st.u_curr = seq.psis[0];
  st.u_prev.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j)
    st.u_prev[j] = seq.psis[0][j] - dt * seq.psis[1][j] +
                   0.5 * dt * dt * seq.psis[2][j];
  const Field u0 = st.u_curr, um1 = st.u_prev;

  const NullFormSpec spec = NullFormSpec::zero();
  const int k = 500;
  for (int m = 0; m < k; ++m) step(st, spec, grid);
  std::swap(st.u_curr, st.u_prev);  // reverse time
  for (int m = 0; m < k; ++m) step(st, spec, grid);

  // After the reversed sweep, u_curr is the original u(-dt) level and
  // u_prev the original u(0).
  double err = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    err = std::max(err, std::abs(st.u_curr[j] - um1[j]));
    err = std::max(err, std::abs(st.u_prev[j] - u0[j]));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("causality: quasilinear support stays inside the light cone") {
  const RadialGrid grid = RadialGrid::make(0.875, 16.0, 0.01);
  const auto data = make_bump_data(grid, 0.875, {3.0, 0.5, 1.0, 1.0, 0.01});
  EvolveOptions opts;
  opts.t_final = 5.0;
  opts.sample_every = 1e300;
  const auto res = evolve(grid, chaplygin_spec(), data, opts);
  REQUIRE(res.status == RunStatus::Completed);
  const Snapshot& last = res.snapshots.back();
  const double front = 3.5 + 5.0 * (1.0 + 10.0 * 0.01);
  for (std::size_t j = 0; j < grid.n; ++j)
    if (grid.r(j) > front) CHECK(std::abs(last.u[j]) <= 1e-12);
}

TEST_CASE("zero horizon produces exactly the t = 0 diagnostics row") {
  const RadialGrid grid = RadialGrid::make(0.875, 10.0, 0.01);
  const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 0.0, 0.01});
  EvolveOptions opts;
  opts.t_final = 0.0;
  const auto res = evolve(grid, NullFormSpec::zero(), data, opts);
  CHECK(res.status == RunStatus::ZeroHorizon);
  REQUIRE(res.report.rows.size() == 1);
  CHECK(res.report.rows[0].t == 0.0);
  CHECK(res.report.rows[0].e0_integral > 0.0);
}

TEST_CASE("linear homogeneous run conserves the discrete energy") {
  const RadialGrid grid = RadialGrid::make(0.875, 32.0, 0.01);
  const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 0.0, 0.01});
  EvolveOptions opts;
  opts.t_final = 20.0;
  opts.sample_every = 0.5;
  const auto res = evolve(grid, NullFormSpec::zero(), data, opts);
  REQUIRE(res.status == RunStatus::Completed);
  const double e0 = res.report.rows.front().e0_integral;
  for (const auto& row : res.report.rows)
    CHECK(std::abs(row.e0_integral - e0) / e0 < 1e-3);
}

TEST_CASE("solver d00 at the first step converges to the psi_2 trace") {
  const auto spec = chaplygin_spec();
  auto d00_mismatch = [&](double dr) {
    const RadialGrid grid = RadialGrid::make(0.875, 8.0, dr);
    const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 1.0, 0.01});
    const auto seq = build_psi2(data, spec, grid);
    const double dt = 0.5 * dr;
    FieldState st;
    st.dt = dt;
    st.u_curr = seq.psis[0];
    st.u_prev.resize(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j)
      st.u_prev[j] = seq.psis[0][j] - dt * seq.psis[1][j] +
                     0.5 * dt * dt * seq.psis[2][j];
    const Field u0 = st.u_curr;
    step(st, spec, grid);
    const Field u1 = st.u_curr;
    step(st, spec, grid);
    const Field u2 = st.u_curr;
    double worst = 0.0;
    for (std::size_t j = 4; j + 4 < grid.n; ++j) {
      const double d00 = (u2[j] - 2.0 * u1[j] + u0[j]) / (dt * dt);
      worst = std::max(worst, std::abs(d00 - seq.psis[2][j]));
    }
    return worst;
  };
  // The mismatch between d_0^2 u sampled at t = dt and the t = 0 trace is
  // dominated by dt psi_3, so it must shrink with the step.
  const double m1 = d00_mismatch(0.02);
  const double m2 = d00_mismatch(0.01);
  CHECK(m2 < 0.7 * m1);
}

TEST_CASE("sommerfeld outer boundary keeps late-time residue small") {
  const RadialGrid grid = RadialGrid::make(0.875, 12.0, 0.01);
  const auto data = make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 0.0, 0.01});
  EvolveOptions opts;
  opts.t_final = 20.0;
  opts.outer = OuterBoundary::Sommerfeld;
  opts.sample_every = 1.0;
  const auto res = evolve(grid, NullFormSpec::zero(), data, opts);
  REQUIRE(res.status == RunStatus::Completed);
  const Snapshot& last = res.snapshots.back();
  double sup = 0.0;
  for (double v : last.u) sup = std::max(sup, std::abs(v));
  // First-order absorption: small reflection residue, far below the pulse.
  CHECK(sup < 5e-4);
}

TEST_CASE("blowup detector fires on the non-null scenario at large data") {
  const RadialGrid grid = RadialGrid::make(0.875, 40.0, 0.02);
  const auto data = make_bump_data(grid, 0.875, {2.0, 1.0, 0.0, 40.0, 0.05});
  EvolveOptions opts;
  opts.t_final = 20.0;
  opts.sample_every = 1e300;
  const auto res = evolve(grid, nonnull_dt2_spec(), data, opts);
  CHECK(res.status == RunStatus::Blowup);
  CHECK(res.blowup_time > 0.0);
  CHECK(res.report.rows.back().blowup_flag == 1);
}

TEST_CASE("manufactured solution satisfies its own forcing identity") {
  ManufacturedSolution ms;
  ms.r_min = 0.875;
  for (double t : {0.5, 2.0}) {
    for (double r : {1.2, 2.5, 3.3}) {
      const double h = 1e-4;
      auto u = [&](double tt, double rr) { return ms.value(tt, rr); };
      const double utt = (u(t + h, r) - 2 * u(t, r) + u(t - h, r)) / (h * h);
      const double urr = (u(t, r + h) - 2 * u(t, r) + u(t, r - h)) / (h * h);
      const double ur = (u(t, r + h) - u(t, r - h)) / (2 * h);
      const double box = utt - urr - 2.0 * ur / r;
      CHECK(box == doctest::Approx(ms.forcing(t, r)).epsilon(1e-4).scale(1.0));
    }
  }
  CHECK(ms.value(1.0, ms.r_min) == 0.0);
  CHECK(ms.taper_d1(ms.r_min) == 0.0);
}

TEST_CASE("manufactured-solution convergence at second order") {
  auto l2_err = [&](double dr) {
    ManufacturedSolution ms;
    ms.r_min = 0.875;
    const RadialGrid grid = RadialGrid::make(0.875, 18.0, dr);
    EvolveOptions opts;
    opts.t_final = 5.0;
    opts.sample_every = 1e300;
    opts.forcing = [ms](double t, double r) { return ms.forcing(t, r); };
    const auto res =
        evolve(grid, NullFormSpec::zero(), ms.initial_data(grid), opts);
    const Snapshot& last = res.snapshots.back();
    Field diff(grid.n), exact(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
      exact[j] = ms.value(last.t, grid.r(j));
      diff[j] = last.u[j] - exact[j];
    }
    return l2_norm(grid, diff) / l2_norm(grid, exact);
  };
  const double e1 = l2_err(1.0 / 50.0);
  const double e2 = l2_err(1.0 / 100.0);
  const double order = std::log(e1 / e2) / std::log(2.0);
  CHECK(order > 1.7);
  CHECK(order < 2.3);
}
