#pragma once

#include <array>

#include "nullwave/geometry.hpp"
#include "nullwave/nullform.hpp"
#include "nullwave/radial_grid.hpp"

namespace nullwave {

/// C-infinity compactly supported radial bump
///   amplitude * exp(-1 / (1 - s^2)),  s = (r - center) / width,
/// zero for |s| >= 1. Closed-form derivatives for oracles and forcing.
struct Bump {
  double center = 3.0;
  double width = 1.0;
  double amplitude = 1.0;

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
};

/// Initial data (u0, u1) on the spatial grid; the evolution uses
/// epsilon * (u0, u1) as in the problem statement.
struct InitialData {
  Field u0;
  Field u1;
  double epsilon = 0.01;
  double support_radius = 4.0;  // data vanish for r > support_radius
};

struct BumpDataSpec {
  double center = 3.0;
  double width = 1.0;
  double u0_amp = 1.0;
  double u1_amp = 0.0;
  double epsilon = 0.01;
};

/// Builds bump data, requiring the support to clear the obstacle boundary
/// (center - width > max b), which makes compatibility of every order exact.
InitialData make_bump_data(const RadialGrid& grid, double boundary_clearance,
                           const BumpDataSpec& spec);

/// Time-derivative traces at t = 0: psi_0 = eps u0, psi_1 = eps u1, and
/// psi_2 solved from the equation.
struct CompatibilitySequence {
  std::array<Field, 3> psis;
  static constexpr int order = 2;
};

/// psi_2 = (Lap(eps u0) + N restricted to the known jets [+ F(0,r)])
/// / (1 - Q^{00}(du)), evaluated nodewise from the t = 0 jets of (u0, u1).
/// Throws DegeneracyError when the d_0^2 coefficient degenerates.
CompatibilitySequence build_psi2(
    const InitialData& data, const NullFormSpec& spec, const RadialGrid& grid,
    const std::function<double(double, double)>* forcing = nullptr);

/// Largest m <= 3 such that |d_nu psi_k| <= tol at the boundary node for all
/// k <= m-1 (second-order one-sided stencil).
int check_compatibility_order(const CompatibilitySequence& seq,
                              const RadialGrid& grid, double tol = 1e-10);

/// Diagnostic form of the weighted data norm, truncated to |beta| <= 2:
/// sum ||<r>^{|b|} grad^b u0|| + sum ||<r>^{1+|b|} grad^b u1||.
double weighted_data_norm(const InitialData& data, const RadialGrid& grid);

}  // namespace nullwave
