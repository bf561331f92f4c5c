#pragma once

#include <vector>

#include "nullwave/scenario.hpp"
#include "nullwave/solver.hpp"
#include "nullwave/tensors.hpp"

namespace nullwave {

/// Chaplygin pressure law P = P0 - A / rho. The normalization A = rho_bar^2
/// makes the background sound speed c(rho_bar) = sqrt(P'(rho_bar)) exactly 1,
/// so the potential equation is a unit-speed wave equation.
struct GasParameters {
  double rho_bar = 1.0;
  double p0 = 2.0;
  double a = 1.0;  // = rho_bar^2, enforced

  static GasParameters make(double rho_bar, double p0);

  double pressure(double rho) const { return p0 - a / rho; }
  /// Enthalpy h with h(rho_bar) = 0; under the normalization
  /// h(rho) = 1/2 - A / (2 rho^2).
  double enthalpy(double rho) const { return 0.5 - a / (2.0 * rho * rho); }
  /// Densities at or below this have nonpositive pressure.
  double vacuum_density() const { return a / p0; }
};

/// Bernoulli inversion: rho = rho_bar / sqrt(1 + 2 d_t phi + |grad phi|^2).
/// Throws DegeneracyError when the radicand is nonpositive (the state has
/// left the physical regime).
double density_from_potential(const Vec4& dphi, const GasParameters& gas);

/// Recovered flow variables at one snapshot time.
struct FlowFrame {
  double t = 0.0;
  Field rho;
  Field u_r;  // radial velocity d_r phi
  double rho_min = 0.0;
  double rho_max = 0.0;
  double max_speed = 0.0;
  double slip_residual = 0.0;
};

struct FlowReport {
  std::vector<FlowFrame> frames;
  bool physical = true;       // rho > A/P0 held at every node and time
  double violation_time = 0.0;
};

/// Post-processes a potential-flow run into (rho, u) time series. Stops at
/// the first physicality violation and stamps the report.
FlowReport flow_report(const std::vector<Snapshot>& snapshots,
                       const RadialGrid& grid, const GasParameters& gas);

/// Pointwise Bernoulli closure residual max |d_t phi + |grad phi|^2 / 2
/// + h(rho)| of one snapshot; definitionally at roundoff level.
double bernoulli_residual(const Snapshot& snap, const RadialGrid& grid,
                          const GasParameters& gas);

/// Discrete continuity check: | d/dt int rho dV + outward boundary flux |
/// between two frames bracketing frame k.
double mass_flux_residual(const FlowFrame& prev, const FlowFrame& next,
                          const RadialGrid& grid);

/// Scenario assembly for the exterior Chaplygin stability experiment:
/// chaplygin nonlinearity, slip (Neumann) wall, potential bump data
/// scaled by epsilon.
ScenarioConfig chaplygin_scenario(double epsilon, const BumpDataSpec& data,
                                  const GasParameters& gas);

}  // namespace nullwave
