#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "nullwave/errors.hpp"

namespace nullwave {

using Field = std::vector<double>;

/// Uniform radial grid r_j = r_min + j dr, j = 0 .. n-1.
struct RadialGrid {
  double r_min = 0.875;
  double dr = 0.005;
  std::size_t n = 16;

  static RadialGrid make(double r_min, double r_max, double dr) {
    if (!(dr > 0.0)) throw ConfigError("grid.dr", "must be positive");
    RadialGrid g;
    g.r_min = r_min;
    g.dr = dr;
    g.n = static_cast<std::size_t>(std::ceil((r_max - r_min) / dr)) + 1;
    if (g.n < 16) throw ConfigError("grid", "needs at least 16 nodes");
    return g;
  }

  double r(std::size_t j) const { return r_min + double(j) * dr; }
  double r_max() const { return r(n - 1); }
  Field zeros() const { return Field(n, 0.0); }
};

/// L2(O) of a radial field: sqrt(4 pi int f^2 r^2 dr), trapezoid in r.
double l2_norm(const RadialGrid& g, const Field& f);

/// Same with a pointwise weight w(r) applied inside the square.
double l2_norm_weighted(const RadialGrid& g, const Field& f,
                        const std::function<double(double)>& w);

/// 4 pi int f r^2 dr (trapezoid).
double volume_integral(const RadialGrid& g, const Field& f);

/// Centered first derivative, one-sided second-order at the ends.
Field deriv(const RadialGrid& g, const Field& f);

/// Second derivative, one-sided second-order at the ends.
Field deriv2(const RadialGrid& g, const Field& f);

/// Derivatives with a Neumann ghost at the inner end: f_{-1} = f_1 - 2 dr g0,
/// where g0 is the boundary datum for d_r f at r_min (0 for the homogeneous
/// condition). The outer end stays one-sided.
Field deriv_neumann(const RadialGrid& g, const Field& f, double g0 = 0.0);
Field deriv2_neumann(const RadialGrid& g, const Field& f, double g0 = 0.0);

}  // namespace nullwave
