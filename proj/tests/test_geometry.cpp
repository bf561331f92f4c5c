#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nullwave/errors.hpp"
#include "nullwave/geometry.hpp"
#include "nullwave/sampling.hpp"

using namespace nullwave;

namespace {
constexpr double kPi = std::numbers::pi;

Mat3 fd_jacobian(const FlattenMap& map, const Vec3& x, double h) {
  Mat3 j{};
  for (int i = 0; i < 3; ++i) {
    Vec3 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const Vec3 fp = map.forward(xp), fm = map.forward(xm);
    for (int k = 0; k < 3; ++k) j[k][i] = (fp[k] - fm[k]) / (2.0 * h);
  }
  return j;
}
}  // namespace

TEST_CASE("cutoff profile plateaus and derivative bound") {
  CHECK(CutoffProfile::value(0.3) == 0.0);
  CHECK(CutoffProfile::value(1.0) == 0.0);
  CHECK(CutoffProfile::value(1.5) == 1.0);
  CHECK(CutoffProfile::value(2.7) == 1.0);
  CHECK(CutoffProfile::value(1.25) == doctest::Approx(0.5));

  // Any smooth profile rising over a width-1/2 window has mean slope 2;
  // the quintic smoothstep peaks at 15/4. Sampled on 1000 points of [0, 3].
  double max_d = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double s = 3.0 * i / 1000.0;
    const double d = CutoffProfile::deriv(s);
    CHECK(d >= 0.0);
    max_d = std::max(max_d, d);
  }
  CHECK(max_d <= CutoffProfile::kMaxSlope + 1e-12);
  // The peak sits at s = 5/4 and equals 15/4 exactly.
  CHECK(CutoffProfile::deriv(1.25) == 15.0 / 4.0);

  // C^2: derivative of deriv matches deriv2 by central differences.
  for (double s : {1.1, 1.2, 1.3, 1.45}) {
    const double h = 1e-6;
    const double fd =
        (CutoffProfile::deriv(s + h) - CutoffProfile::deriv(s - h)) / (2 * h);
    CHECK(fd == doctest::Approx(CutoffProfile::deriv2(s)).epsilon(1e-6));
  }
}

TEST_CASE("eval_b: ball and star profiles") {
  const auto ball = ObstacleShape::ball(7.0 / 8.0);
  CHECK(ball.eval_b({0, 0, 1}) == 7.0 / 8.0);
  CHECK(ball.eval_b({1, 0, 0}) == 7.0 / 8.0);

  const auto star0 = ObstacleShape::star_shaped(7.0 / 8.0, {});
  CHECK(star0.eval_b({0.6, 0.8, 0.0}) == doctest::Approx(7.0 / 8.0));

  // Degree-2 zonal harmonic at the pole: Y_20(pole) = sqrt(5/(4 pi)).
  const auto star = ObstacleShape::star_shaped(7.0 / 8.0, {{2, 0, 0.01}});
  const double y20_pole = std::sqrt(5.0 / (4.0 * kPi));
  CHECK(star.eval_b({0, 0, 1}) ==
        doctest::Approx(7.0 / 8.0 + 0.01 * y20_pole).epsilon(1e-12));

  CHECK_THROWS_AS((void)ball.eval_b({0, 0, 2}), DomainError);
}

TEST_CASE("shape validation rejects out-of-range and non-convex profiles") {
  CHECK_THROWS_AS(ObstacleShape::ball(0.5), GeometryError);
  CHECK_THROWS_AS(ObstacleShape::ball(1.0), GeometryError);
  // A large harmonic bump breaks 3/4 < b < 1 or convexity.
  CHECK_THROWS_AS(ObstacleShape::star_shaped(7.0 / 8.0, {{4, 2, 0.2}}),
                  GeometryError);
}

TEST_CASE("outward normal: radial for ball, orthogonal to tangents for star") {
  const auto ball = ObstacleShape::ball(7.0 / 8.0);
  const Vec3 n1 = ball.outward_normal({1, 0, 0});
  CHECK(n1[0] == doctest::Approx(-1.0));
  CHECK(std::abs(n1[1]) < 1e-15);
  const Vec3 n2 = ball.outward_normal({0, 1, 0});
  CHECK(n2[1] == doctest::Approx(-1.0));

  const auto star = ObstacleShape::star_shaped(7.0 / 8.0, {{2, 0, 0.01}});
  const Vec3 w{0, 0, 1};
  // Finite-difference tangents of the surface c(omega) = b(omega) omega.
  auto surf = [&](const Vec3& om) { return scale(om, star.eval_b(om)); };
  const double h = 1e-5;
  for (const Vec3 tdir : {Vec3{1, 0, 0}, Vec3{0, 1, 0}}) {
    const Vec3 p = surf(normalized(add(w, scale(tdir, h))));
    const Vec3 m = surf(normalized(sub(w, scale(tdir, h))));
    const Vec3 tangent = normalized(sub(p, m));
    CHECK(std::abs(dot(tangent, star.outward_normal(w))) < 1e-8);
  }
}

TEST_CASE("flatten: boundary to unit sphere, identity far field") {
  const auto ball = ObstacleShape::ball(7.0 / 8.0);
  const FlattenMap map(ball);

  const Vec3 xb{7.0 / 8.0, 0, 0};
  const Vec3 yb = map.forward(xb);
  CHECK(norm(yb) == doctest::Approx(1.0).epsilon(1e-14));

  // rho(2) = 1, so the divisor is exactly 1 for |x| >= 4 (and >= 3 by branch).
  const Vec3 xf{0, 0, 4};
  const Vec3 yf = map.forward(xf);
  CHECK(yf[2] == 4.0);  // bitwise identity branch
  CHECK(map.jacobian(xf) == kIdentity3);

  // |x| = 2.5: divisor (1 - rho(1.25)) b + rho(1.25); round trip through the
  // inverse map.
  const Vec3 xm{2.5, 0, 0};
  const Vec3 ym = map.forward(xm);
  const double div = (1.0 - 0.5) * (7.0 / 8.0) + 0.5;
  CHECK(ym[0] == doctest::Approx(2.5 / div).epsilon(1e-12));
  const Vec3 back = map.inverse(ym);
  CHECK(back[0] == doctest::Approx(2.5).epsilon(1e-11));

  CHECK_THROWS_AS((void)map.forward(Vec3{0.5, 0, 0}), DomainError);
  CHECK_THROWS_AS((void)map.inverse(Vec3{0.5, 0, 0}), DomainError);
}

TEST_CASE("flatten jacobian: pure scaling near boundary, FD oracle inside") {
  const auto ball = ObstacleShape::ball(7.0 / 8.0);
  const FlattenMap map(ball);

  // |x| <= 2: the map is x / b, so the Jacobian is I / b.
  const Mat3 j0 = map.jacobian({7.0 / 8.0, 0, 0});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(j0[a][b] == doctest::Approx((a == b ? 8.0 / 7.0 : 0.0)));

  // Transition region: analytic vs central finite differences.
  const Vec3 x{1.1, 0.3, 0.2};
  const Mat3 ja = map.jacobian(x);
  const Mat3 jf = fd_jacobian(map, x, 1e-5);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(ja[a][b] == doctest::Approx(jf[a][b]).epsilon(1e-6));

  const Vec3 x2{2.4, 0.7, -0.4};
  const Mat3 ja2 = map.jacobian(x2);
  const Mat3 jf2 = fd_jacobian(map, x2, 1e-5);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(ja2[a][b] == doctest::Approx(jf2[a][b]).epsilon(1e-5));
}

TEST_CASE("diffeomorphism round trip on 10^4 random points") {
  const auto star = ObstacleShape::star_shaped(7.0 / 8.0, {{2, 0, 0.01},
                                                           {3, 1, 0.005}});
  const FlattenMap map(star);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rad(0.0, 1.0);
  std::size_t checked = 0;
  while (checked < 10000) {
    const Vec3 w = random_unit(rng);
    const double b = star.eval_b(w);
    const double r = b + (6.0 - b) * rad(rng);
    const Vec3 x = scale(w, r);
    const Vec3 x2 = map.inverse(map.forward(x));
    const double rel = norm(sub(x2, x)) / norm(x);
    CHECK(rel < 1e-9);
    ++checked;
  }
}

TEST_CASE("jacobian positivity witness across the collar") {
  for (const auto& shape :
       {ObstacleShape::ball(7.0 / 8.0),
        ObstacleShape::star_shaped(0.9, {{2, 1, 0.01}})}) {
    const FlattenMap map(shape);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
      const Vec3 w = random_unit(rng);
      const double b = shape.eval_b(w);
      // Clearance for the star path's finite-difference Jacobian stencil.
      const double r = b + 1e-4 + (3.4 - b) * (k / 200.0);
      CHECK(map.radial_derivative(r, w) > 0.0);
      const double d = det3(map.jacobian(scale(w, r)));
      CHECK(d > 0.0);
    }
  }
}

TEST_CASE("inverse jacobian inverts the jacobian") {
  const FlattenMap map(ObstacleShape::ball(7.0 / 8.0));
  const Vec3 x{1.3, -0.2, 0.4};
  const Mat3 j = map.jacobian(x);
  const Mat3 ji = map.inverse_jacobian(x);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int m = 0; m < 3; ++m) s += j[a][m] * ji[m][b];
      CHECK(s == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("map laplacian matches finite differences of the forward map") {
  const FlattenMap map(ObstacleShape::ball(7.0 / 8.0));
  for (const Vec3& x : {Vec3{2.3, 0.5, 0.1}, Vec3{1.0, 0.2, -0.3}}) {
    const Vec3 lap = map.map_laplacian(x);
    const double h = 1e-4;
    Vec3 fd{0, 0, 0};
    const Vec3 f0 = map.forward(x);
    for (int i = 0; i < 3; ++i) {
      Vec3 xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const Vec3 fp = map.forward(xp), fm = map.forward(xm);
      for (int k2 = 0; k2 < 3; ++k2)
        fd[k2] += (fp[k2] - 2.0 * f0[k2] + fm[k2]) / (h * h);
    }
    for (int k2 = 0; k2 < 3; ++k2)
      CHECK(lap[k2] == doctest::Approx(fd[k2]).epsilon(1e-4).scale(1.0));
  }
}
