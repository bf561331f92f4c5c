#include "nullwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nullwave/errors.hpp"
#include "nullwave/sampling.hpp"

namespace nullwave {

namespace {

constexpr double kPi = std::numbers::pi;

void require_unit(const Vec3& omega) {
  if (std::abs(norm(omega) - 1.0) > 1e-12)
    throw DomainError("direction is not a unit vector");
}

// Orthonormal tangent pair at a unit direction.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& omega) {
  Vec3 seed{1, 0, 0};
  if (std::abs(omega[0]) > 0.9) seed = Vec3{0, 1, 0};
  Vec3 t1 = normalized(cross(omega, seed));
  Vec3 t2 = cross(omega, t1);
  return {t1, t2};
}

// Associated Legendre P_l^m (no Condon-Shortley phase), m >= 0.
double assoc_legendre(int l, int m, double x) {
  double pmm = 1.0;
  if (m > 0) {
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= fact * s;
      fact += 2.0;
    }
  }
  if (l == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

double factorial_ratio(int l, int m) {
  // (l - m)! / (l + m)!
  double r = 1.0;
  for (int k = l - m + 1; k <= l + m; ++k) r /= k;
  return r;
}

}  // namespace

double CutoffProfile::value(double s) {
  if (s <= 1.0) return 0.0;
  if (s >= 1.5) return 1.0;
  const double t = 2.0 * (s - 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double CutoffProfile::deriv(double s) {
  if (s <= 1.0 || s >= 1.5) return 0.0;
  const double t = 2.0 * (s - 1.0);
  return 60.0 * t * t * (1.0 - t) * (1.0 - t);
}

double CutoffProfile::deriv2(double s) {
  if (s <= 1.0 || s >= 1.5) return 0.0;
  const double t = 2.0 * (s - 1.0);
  return 240.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

double real_sph_harm(int degree, int order, const Vec3& omega) {
  require_unit(omega);
  if (degree < 0 || std::abs(order) > degree)
    throw DomainError("invalid spherical harmonic (degree, order)");
  const double ct = std::clamp(omega[2], -1.0, 1.0);
  const double phi = std::atan2(omega[1], omega[0]);
  const int m = std::abs(order);
  const double k = std::sqrt((2.0 * degree + 1.0) / (4.0 * kPi) *
                             factorial_ratio(degree, m));
  const double p = assoc_legendre(degree, m, ct);
  if (order == 0) return k * p;
  const double a = std::numbers::sqrt2 * k * p;
  return order > 0 ? a * std::cos(m * phi) : a * std::sin(m * phi);
}

ObstacleShape ObstacleShape::ball(double b_const) {
  ObstacleShape s;
  s.kind_ = Kind::Ball;
  s.b_const_ = b_const;
  s.validate(0x0b57ac1eULL);
  return s;
}

ObstacleShape ObstacleShape::star_shaped(double base,
                                         std::vector<Harmonic> harmonics) {
  ObstacleShape s;
  s.kind_ = Kind::StarShaped;
  s.b_const_ = base;
  s.harmonics_ = std::move(harmonics);
  s.validate(0x0b57ac1eULL);
  return s;
}

double ObstacleShape::eval_b(const Vec3& omega) const {
  require_unit(omega);
  if (kind_ == Kind::Ball) return b_const_;
  double b = b_const_;
  for (const auto& h : harmonics_)
    b += h.coeff * real_sph_harm(h.degree, h.order, omega);
  return b;
}

Vec3 ObstacleShape::outward_normal(const Vec3& omega) const {
  require_unit(omega);
  if (kind_ == Kind::Ball) return scale(omega, -1.0);
  // Surface {r = b(omega)}: gradient of r - b(x/r) is omega - grad_S b / b.
  const auto [t1, t2] = tangent_basis(omega);
  const double h = 1e-6;
  const double d1 = (eval_b(normalized(add(omega, scale(t1, h)))) -
                     eval_b(normalized(sub(omega, scale(t1, h))))) /
                    (2.0 * h);
  const double d2 = (eval_b(normalized(add(omega, scale(t2, h)))) -
                     eval_b(normalized(sub(omega, scale(t2, h))))) /
                    (2.0 * h);
  const double b = eval_b(omega);
  Vec3 n = sub(omega, add(scale(t1, d1 / b), scale(t2, d2 / b)));
  return scale(normalized(n), -1.0);
}

void ObstacleShape::validate(std::uint64_t seed) {
  const auto dirs = unit_directions(512, seed);
  max_b_ = 0.0;
  min_b_ = 1e300;
  for (const auto& w : dirs) {
    const double b = eval_b(w);
    max_b_ = std::max(max_b_, b);
    min_b_ = std::min(min_b_, b);
  }
  if (!(min_b_ > 0.75 && max_b_ < 1.0))
    throw GeometryError("radial profile must satisfy 3/4 < b(omega) < 1");
  if (kind_ == Kind::Ball) return;

  // Sampled second fundamental form of {r = b(omega)}, taken against the
  // inward normal; convexity requires it positive semidefinite.
  const double h = 1e-4;
  for (const auto& w : dirs) {
    const auto [t1, t2] = tangent_basis(w);
    auto surf = [&](double s1, double s2) {
      const Vec3 wo =
          normalized(add(w, add(scale(t1, s1), scale(t2, s2))));
      return scale(wo, eval_b(wo));
    };
    const Vec3 c0 = surf(0, 0);
    const Vec3 cpp = surf(h, 0), cmm = surf(-h, 0);
    const Vec3 dpp = surf(0, h), dmm = surf(0, -h);
    const Vec3 cross1 = surf(h, h), cross2 = surf(h, -h), cross3 = surf(-h, h),
               cross4 = surf(-h, -h);
    const Vec3 s11 = scale(add(add(cpp, cmm), scale(c0, -2.0)), 1.0 / (h * h));
    const Vec3 s22 = scale(add(add(dpp, dmm), scale(c0, -2.0)), 1.0 / (h * h));
    const Vec3 s12 = scale(
        add(sub(cross1, cross2), sub(cross4, cross3)), 1.0 / (4.0 * h * h));
    const Vec3 e1 = scale(sub(cpp, cmm), 1.0 / (2.0 * h));
    const Vec3 e2 = scale(sub(dpp, dmm), 1.0 / (2.0 * h));
    Vec3 n = normalized(cross(e1, e2));
    if (dot(n, w) < 0.0) n = scale(n, -1.0);  // outward from the body
    const double ii11 = -dot(s11, n);
    const double ii22 = -dot(s22, n);
    const double ii12 = -dot(s12, n);
    const double tol = 1e-6;
    if (ii11 < -tol || ii22 < -tol ||
        ii11 * ii22 - ii12 * ii12 < -tol)
      throw GeometryError("star-shaped profile is not convex at a sampled point");
  }
}

FlattenMap::FlattenMap(ObstacleShape shape) : shape_(std::move(shape)) {
  // Diffeomorphism witness: d/dr (r / D) > 0 on a sample of the collar.
  const auto dirs = unit_directions(64, 0xf1a77e4ULL);
  for (const auto& w : dirs) {
    const double b = shape_.eval_b(w);
    for (int i = 0; i <= 80; ++i) {
      const double r = b + (3.5 - b) * i / 80.0;
      if (radial_derivative(r, w) <= 0.0)
        throw GeometryError(
            "flatten map is not a diffeomorphism: radial derivative <= 0 "
            "(profile too close to 3/4 for the fixed cutoff)");
    }
  }
}

double FlattenMap::divisor(double r, const Vec3& omega) const {
  const double rho = CutoffProfile::value(r / 2.0);
  return (1.0 - rho) * shape_.eval_b(omega) + rho;
}

double FlattenMap::radial_derivative(double r, const Vec3& omega) const {
  const double b = shape_.eval_b(omega);
  const double rho = CutoffProfile::value(r / 2.0);
  const double drho = 0.5 * CutoffProfile::deriv(r / 2.0);
  const double d = (1.0 - rho) * b + rho;
  return (d - r * (1.0 - b) * drho) / (d * d);
}

Vec3 FlattenMap::forward(const Vec3& x) const {
  const double r = norm(x);
  if (r >= 3.0) return x;
  const Vec3 omega = scale(x, 1.0 / r);
  const double b = shape_.eval_b(omega);
  if (r < b * (1.0 - 1e-12))
    throw DomainError("point lies inside the obstacle");
  return scale(x, 1.0 / divisor(r, omega));
}

double FlattenMap::inverse_radius(double rho_y, const Vec3& omega) const {
  if (rho_y >= 3.0) return rho_y;
  const double b = shape_.eval_b(omega);
  if (rho_y < 1.0 - 1e-12)
    throw DomainError("image point lies inside the unit ball");
  double lo = b * (1.0 - 1e-14), hi = 3.0;
  auto g = [&](double r) { return r / divisor(r, omega) - rho_y; };
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    const double d = radial_derivative(r, omega);
    r -= g(r) / d;
    r = std::clamp(r, b * (1.0 - 1e-14), 3.0);
  }
  return r;
}

Vec3 FlattenMap::inverse(const Vec3& y) const {
  const double rho_y = norm(y);
  if (rho_y >= 3.0) return y;
  const Vec3 omega = scale(y, 1.0 / rho_y);
  return scale(omega, inverse_radius(rho_y, omega));
}

Mat3 FlattenMap::jacobian(const Vec3& x) const {
  const double r = norm(x);
  if (r >= 3.0) return kIdentity3;
  Mat3 j{};
  if (shape_.kind() == ObstacleShape::Kind::Ball) {
    const Vec3 omega = scale(x, 1.0 / r);
    const double d = divisor(r, omega);
    const double b = shape_.base();
    const double dp = 0.5 * (1.0 - b) * CutoffProfile::deriv(r / 2.0);
    const double g = 1.0 / d;
    const double gp = -dp / (d * d);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        j[k][i] = g * (k == i ? 1.0 : 0.0) + r * gp * omega[k] * omega[i];
  } else {
    const double h = 1e-5;
    // Surface-adjacent evaluation points are nudged outward so the central
    // stencil stays inside the domain; the coefficients are continuous.
    Vec3 xe = x;
    const Vec3 omega = scale(x, 1.0 / r);
    const double b = shape_.eval_b(omega);
    if (r < b + 2.0 * h) xe = scale(omega, b + 2.0 * h);
    for (int i = 0; i < 3; ++i) {
      Vec3 xp = xe, xm = xe;
      xp[i] += h;
      xm[i] -= h;
      const Vec3 fp = forward(xp), fm = forward(xm);
      for (int k = 0; k < 3; ++k) j[k][i] = (fp[k] - fm[k]) / (2.0 * h);
    }
  }
  if (det3(j) < 1e-8)
    throw GeometryError("flatten map Jacobian is near-singular");
  return j;
}

Mat3 FlattenMap::inverse_jacobian(const Vec3& x) const {
  const Mat3 j = jacobian(x);
  const double d = det3(j);
  Mat3 inv{};
  inv[0][0] = (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / d;
  inv[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / d;
  inv[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / d;
  inv[1][0] = (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / d;
  inv[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / d;
  inv[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / d;
  inv[2][0] = (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / d;
  inv[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / d;
  inv[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / d;
  return inv;
}

Vec3 FlattenMap::map_laplacian(const Vec3& x) const {
  const double r = norm(x);
  if (r >= 3.0) return Vec3{0, 0, 0};
  if (shape_.kind() == ObstacleShape::Kind::Ball) {
    const Vec3 omega = scale(x, 1.0 / r);
    const double b = shape_.base();
    const double d = divisor(r, omega);
    const double dp = 0.5 * (1.0 - b) * CutoffProfile::deriv(r / 2.0);
    const double dpp = 0.25 * (1.0 - b) * CutoffProfile::deriv2(r / 2.0);
    const double gp = -dp / (d * d);
    const double gpp = (2.0 * dp * dp - d * dpp) / (d * d * d);
    return scale(omega, r * gpp + 4.0 * gp);
  }
  const double h = 1e-4;
  Vec3 xe = x;
  const Vec3 omega = scale(x, 1.0 / r);
  const double b = shape_.eval_b(omega);
  if (r < b + 2.0 * h) xe = scale(omega, b + 2.0 * h);
  Vec3 lap{0, 0, 0};
  const Vec3 f0 = forward(xe);
  for (int i = 0; i < 3; ++i) {
    Vec3 xp = xe, xm = xe;
    xp[i] += h;
    xm[i] -= h;
    const Vec3 fp = forward(xp), fm = forward(xm);
    for (int k = 0; k < 3; ++k)
      lap[k] += (fp[k] - 2.0 * f0[k] + fm[k]) / (h * h);
  }
  return lap;
}

}  // namespace nullwave
