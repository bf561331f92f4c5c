#pragma once

#include <cstdint>
#include <vector>

#include "nullwave/tensors.hpp"

namespace nullwave {

/// Smooth cutoff with plateaus rho(s) = 0 for s <= 1 and rho(s) = 1 for
/// s >= 3/2, realized as the quintic smoothstep on [1, 3/2]. C^2, monotone,
/// max slope 15/4 (any smooth profile with these plateaus has max slope > 2,
/// the transition width being 1/2; 15/4 keeps the flattening map's radial
/// derivative positive for every profile with b > 15/19, in particular the
/// whole b in (0.8072.., 1) range used here).
struct CutoffProfile {
  static double value(double s);
  static double deriv(double s);
  static double deriv2(double s);
  /// max_s rho'(s) for the quintic smoothstep on a width-1/2 transition.
  static constexpr double kMaxSlope = 15.0 / 4.0;
};

/// One real-spherical-harmonic perturbation of the radial profile.
struct Harmonic {
  int degree = 0;     // l >= 0
  int order = 0;      // -l <= m <= l
  double coeff = 0.0;
};

/// Orthonormal real spherical harmonic Y_{l,m} at unit direction omega.
/// Convention: Y_{l,0} = sqrt((2l+1)/4pi) P_l(cos th); for m != 0 the
/// sqrt(2)-normalized cos/sin forms, no Condon-Shortley phase.
double real_sph_harm(int degree, int order, const Vec3& omega);

/// The obstacle K = { r omega : r < b(omega) } with 3/4 < b < 1.
class ObstacleShape {
public:
  enum class Kind { Ball, StarShaped };

  static ObstacleShape ball(double b_const);
  static ObstacleShape star_shaped(double base, std::vector<Harmonic> harmonics);

  Kind kind() const { return kind_; }
  double base() const { return b_const_; }
  const std::vector<Harmonic>& harmonics() const { return harmonics_; }

  /// b(omega). Requires |omega| = 1 within 1e-12.
  double eval_b(const Vec3& omega) const;

  /// Unit outward normal of the exterior domain O at the surface point
  /// b(omega) omega. Sign convention: points away from O, i.e. into the
  /// obstacle; for Ball this is -omega. Only |d_nu u| is ever used, so the
  /// convention carries no physical content beyond consistency.
  Vec3 outward_normal(const Vec3& omega) const;

  /// Extremes of b over the construction-time sample set.
  double max_b() const { return max_b_; }
  double min_b() const { return min_b_; }

private:
  ObstacleShape() = default;
  void validate(std::uint64_t seed);

  Kind kind_ = Kind::Ball;
  double b_const_ = 0.875;
  std::vector<Harmonic> harmonics_;
  double max_b_ = 0.0;
  double min_b_ = 0.0;
};

/// Boundary-flattening diffeomorphism y = x / ((1 - rho(|x|/2)) b(omega)
/// + rho(|x|/2)). Sends {r = b(omega)} to the unit sphere, identity for
/// |x| >= 3.
class FlattenMap {
public:
  explicit FlattenMap(ObstacleShape shape);

  const ObstacleShape& shape() const { return shape_; }

  /// Denominator D(r, omega) of the map.
  double divisor(double r, const Vec3& omega) const;

  /// d/dr of r / D(r, omega); strictly positive for a valid map.
  double radial_derivative(double r, const Vec3& omega) const;

  Vec3 forward(const Vec3& x) const;
  Vec3 inverse(const Vec3& y) const;

  /// Scalar radius inversion: the r with r / D(r, omega) = rho_y.
  double inverse_radius(double rho_y, const Vec3& omega) const;

  /// dy/dx. Analytic for Ball, central finite differences (step 1e-5)
  /// for StarShaped. Exactly the identity (by branch) for |x| >= 3.
  Mat3 jacobian(const Vec3& x) const;

  /// dx/dy at x, i.e. the matrix inverse of jacobian(x).
  Mat3 inverse_jacobian(const Vec3& x) const;

  /// Laplacian of the map components, B_k = Delta_x y_k; needed by the
  /// flattened-coordinate wave operator. Analytic for Ball.
  Vec3 map_laplacian(const Vec3& x) const;

private:
  ObstacleShape shape_;
};

}  // namespace nullwave
