#pragma once

#include <functional>
#include <vector>

#include "nullwave/radial_grid.hpp"

namespace nullwave {

/// The spherical-mean reduction: d_t^2 V - d_r^2 V - (2/r) d_r V = F1 on
/// r > 1 with d_r V = F2 at r = 1 and V = 0 for t <= 0. Closed by the
/// explicit outgoing-wave + characteristic-triangle expression
///   V(t,r) = V0(t-r+1)/r
///          + (1/r) int_1^r [ int_{r'}^{t-r+2r'} s F1(t-r+2r'-s, s) ds ] dr',
///   V0(p)  = e^{-p} int_0^p e^l [ int_1^{l+1} s F1(l+1-s, s) ds - F2(l) ] dl.
/// All integrals are composite Simpson at `quad_step`. The support hints
/// keep the nested quadrature over the forcing support only.
struct SphericalOracleProblem {
  std::function<double(double, double)> f1;  // forcing (t, r); 0 for t <= 0
  std::function<double(double)> f2;          // Neumann datum at r = 1
  double quad_step = 0.01;
  double f1_r_lo = 1.0;
  double f1_r_hi = 1e300;
  double f1_t_hi = 1e300;
};

class SphericalOracle {
public:
  explicit SphericalOracle(SphericalOracleProblem p);

  /// Boundary wave profile V0(p); 0 for p <= 0. Cached on a uniform table.
  double v0(double p) const;

  /// V(t, r) for r >= 1; 0 for t <= 0.
  double operator()(double t, double r) const;

  struct Residuals {
    double pde = 0.0;  // max |V_tt - V_rr - (2/r) V_r - F1|
    double bc = 0.0;   // max |d_r V(t,1) - F2(t)|
  };

  /// Finite-difference substitution of the quadrature output into the
  /// problem; the formula is trusted only after this shrinks like h^2.
  Residuals validate(double t0, double t1, double r0, double r1, double h,
                     int nt = 5, int nr = 5) const;

private:
  double g_of(double l) const;
  void extend_table(double p_max) const;

  SphericalOracleProblem prob_;
  mutable std::vector<double> exp_g_;       // e^l g(l) on the p-grid
  mutable std::vector<double> integral_;    // cumulative int_0^p e^l g dl
};

/// Composite Simpson on [a, b] with subintervals of size <= step.
double simpson(const std::function<double(double)>& f, double a, double b,
               double step);

}  // namespace nullwave
