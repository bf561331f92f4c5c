#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nullwave/errors.hpp"
#include "nullwave/solver.hpp"
#include "nullwave/solver3d.hpp"

using namespace nullwave;

TEST_CASE("zero data stays zero") {
  const auto shape = ObstacleShape::ball(7.0 / 8.0);
  Options3D opts;
  opts.t_final = 0.5;
  opts.nr = 24;
  opts.nth = 8;
  opts.nph = 16;
  opts.y_max = 6.0;
  opts.data = {3.0, 1.0, 0.0, 0.0, 0.0};
  const auto res = run_3d_linear(shape, opts);
  CHECK(res.finite);
  for (double v : res.v) CHECK(v == 0.0);
  for (const auto& [t, e] : res.energy_track) CHECK(e == 0.0);
}

TEST_CASE("explicit dt above the angular CFL bound is rejected") {
  const auto shape = ObstacleShape::ball(7.0 / 8.0);
  Options3D opts;
  opts.nr = 24;
  opts.nth = 16;
  opts.nph = 32;
  opts.y_max = 6.0;
  opts.dt = 0.05;  // far above the pole-ring bound
  try {
    run_3d_linear(shape, opts);
    FAIL("expected CFL rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("need dt <=") != std::string::npos);
  }
}

TEST_CASE("spherical data on the ball matches the radial solver") {
  const auto shape = ObstacleShape::ball(7.0 / 8.0);
  const FlattenMap map(shape);

  Options3D opts;
  opts.t_final = 1.5;
  opts.nr = 64;
  opts.nth = 12;
  opts.nph = 24;
  opts.y_max = 6.3;
  opts.data = {3.0, 1.0, 1.0, 0.0, 0.01};
  const auto r3 = run_3d_linear(shape, opts);
  REQUIRE(r3.finite);
  CHECK(r3.min_jacobian_det > 0.0);

  // Radial reference at matched coarse resolution and matched step.
  const RadialGrid rg = RadialGrid::make(shape.base(), 7.5, r3.grid.drho);
  const auto data = make_bump_data(rg, shape.base(), opts.data);
  EvolveOptions eopts;
  eopts.t_final = opts.t_final;
  eopts.cfl = std::min(0.5, r3.dt / rg.dr);
  eopts.sample_every = 1e300;
  const auto rad = evolve(rg, NullFormSpec::zero(), data, eopts);
  const Snapshot& last = rad.snapshots.back();

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < r3.grid.nr; ++i) {
    const double rho = r3.grid.rho(i);
    const double r = map.inverse_radius(rho, Vec3{0, 0, 1});
    const double pos = (r - rg.r_min) / rg.dr;
    const auto j0 = std::min(std::size_t(pos), rg.n - 2);
    const double fr = pos - double(j0);
    const double u_rad = last.u[j0] * (1.0 - fr) + last.u[j0 + 1] * fr;
    num += (r3.radial_mean[i] - u_rad) * (r3.radial_mean[i] - u_rad) * r * r;
    den += u_rad * u_rad * r * r;
  }
  REQUIRE(den > 0.0);
  CHECK(std::sqrt(num / den) < 0.05);
}

TEST_CASE("angular bump stays finite with bounded energy") {
  const auto shape = ObstacleShape::ball(7.0 / 8.0);
  Options3D opts;
  opts.t_final = 2.0;
  opts.nr = 32;
  opts.nth = 16;
  opts.nph = 32;
  opts.y_max = 6.0;
  opts.data = {3.0, 1.0, 1.0, 0.0, 0.01};
  const Bump ang{0.5 * std::numbers::pi, 0.6, 1.0};
  opts.angular_profile = [ang](double th, double) { return ang.value(th); };
  const auto res = run_3d_linear(shape, opts);
  REQUIRE(res.finite);
  REQUIRE(res.energy_track.size() > 2);
  const double e0 = res.energy_track[1].second;  // after the first sample
  CHECK(e0 > 0.0);
  for (const auto& [t, e] : res.energy_track)
    if (t > 0) CHECK(e < 3.0 * e0);
}

TEST_CASE("star-shaped obstacle runs and keeps a positive jacobian") {
  const auto shape = ObstacleShape::star_shaped(0.9, {{2, 0, 0.01}});
  Options3D opts;
  opts.t_final = 0.4;
  opts.nr = 20;
  opts.nth = 8;
  opts.nph = 16;
  opts.y_max = 5.0;
  opts.data = {2.8, 0.8, 1.0, 0.0, 0.01};
  const auto res = run_3d_linear(shape, opts);
  CHECK(res.finite);
  CHECK(res.min_jacobian_det > 0.0);
  CHECK(res.envelope_max > 0.0);
}
