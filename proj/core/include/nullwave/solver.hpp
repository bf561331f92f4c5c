#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "nullwave/diagnostics.hpp"
#include "nullwave/initial.hpp"
#include "nullwave/nullform.hpp"
#include "nullwave/radial_grid.hpp"

namespace nullwave {

/// Right-hand side forcing F(t, r); empty means homogeneous.
using Forcing = std::function<double(double, double)>;
/// Inhomogeneous Neumann datum g(t) for d_r u at r_min; empty means 0.
using NeumannDatum = std::function<double(double)>;

enum class OuterBoundary {
  // Grid sized so that no signal reaches r_max within the run; exact.
  DomainOfDependence,
  // First-order radiating closure (d_t + d_r + 1/r) u = 0; approximate.
  Sommerfeld,
};

/// Two consecutive time levels of the evolved field. dt = cfl * dr.
struct FieldState {
  Field u_prev;  // level n-1
  Field u_curr;  // level n
  double t = 0.0;
  double dt = 0.0;
};

struct StepOptions {
  double picard_tol = 1e-12;
  int picard_cap = 25;
  OuterBoundary outer = OuterBoundary::DomainOfDependence;
  const Forcing* forcing = nullptr;
  const NeumannDatum* neumann = nullptr;
};

/// One leapfrog step of d_t^2 u = d_r^2 u + (2/r) d_r u + N(du, d2u) [+ F].
/// The nonlinearity couples the new level through d_0 u, d_0^2 u and the
/// mixed d^2_{0r} u stencils; the update is closed by fixed-point iteration
/// on the new level (tolerance picard_tol, cap picard_cap), mirroring the
/// per-step Picard scheme of the local theory. Neumann condition enforced
/// with a second-order ghost node at r_min. Throws DivergenceError when the
/// fixed point fails to converge.
void step(FieldState& state, const NullFormSpec& spec, const RadialGrid& grid,
          const StepOptions& opts = {});

/// Number of fixed-point sweeps taken by the most recent step().
int last_step_iterations();

struct Snapshot {
  double t = 0.0;
  Field u;
  Field du_t;
  Field du_r;
};

enum class RunStatus { Completed, Blowup, ZeroHorizon };

struct EvolveOptions {
  double t_final = 10.0;
  double cfl = 0.5;
  OuterBoundary outer = OuterBoundary::DomainOfDependence;
  double snapshot_every = -1.0;      // <= 0: only t = 0 and t_final
  double sample_every = 0.1;         // diagnostics cadence
  int order_cap = 2;                 // vector-field order for energies
  double blowup_factor = 1e3;        // sup|du| amplification threshold
  double picard_tol = 1e-12;
  int picard_cap = 25;
  Forcing forcing;                   // optional
  NeumannDatum neumann;              // optional
  bool keep_all_snapshots = false;   // snapshot at every sample time
};

struct RunResult {
  RunStatus status = RunStatus::Completed;
  double blowup_time = 0.0;
  std::vector<Snapshot> snapshots;
  DiagnosticsReport report;
  double initial_sup_du = 0.0;
  double max_sup_du = 0.0;
};

/// Evolves the initial data to t_final. The leapfrog is cold-started from
/// the compatibility sequence, u(-dt) = psi_0 - dt psi_1 + dt^2/2 psi_2.
/// Deterministic for a fixed configuration: fixed iteration orders, no
/// parallel reductions in any accumulation.
RunResult evolve(const RadialGrid& grid, const NullFormSpec& spec,
                 const InitialData& data, const EvolveOptions& opts);

/// Manufactured solution u* = taper(r) * bump(r - t) with d_r u*(t, r_min)=0,
/// and the forcing F = Box u* it satisfies; drives convergence studies.
struct ManufacturedSolution {
  double r_min = 0.875;
  Bump profile{3.0, 1.0, 1.0};
  double taper_on = 0.0;   // defaults to r_min + 0.2
  double taper_off = 0.0;  // defaults to r_min + 1.0

  double taper(double r) const;
  double taper_d1(double r) const;
  double taper_d2(double r) const;
  double value(double t, double r) const;
  double dt_value(double t, double r) const;
  double forcing(double t, double r) const;
  InitialData initial_data(const RadialGrid& grid) const;
};

}  // namespace nullwave
