#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nullwave/geometry.hpp"
#include "nullwave/runner.hpp"
#include "nullwave/scenario.hpp"

namespace nullwave {

/// Flattened spherical grid over 1 <= |y| <= y_max. Radial nodes are
/// vertex-centered (first node on the unit sphere); theta is cell-centered
/// so the poles are never sampled; phi is periodic.
struct Grid3D {
  double drho = 0.1;
  std::size_t nr = 64;
  std::size_t nth = 32;
  std::size_t nph = 64;

  double rho(std::size_t i) const { return 1.0 + double(i) * drho; }
  double theta(std::size_t j) const;
  double phi(std::size_t k) const;
  std::size_t size() const { return nr * nth * nph; }
  std::size_t idx(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * nth + j) * nph + k;
  }
};

using Field3 = std::vector<double>;

struct Options3D {
  double t_final = 3.0;
  double cfl = 0.5;
  double dt = 0.0;  // 0: derive from the CFL bound; explicit values checked
  std::size_t nr = 64;
  std::size_t nth = 32;
  std::size_t nph = 64;
  double y_max = 8.0;
  double sample_every = 0.25;
  // Initial data as radial bumps in the physical (x) radius, optionally
  // modulated in angle.
  BumpDataSpec data{3.0, 1.0, 1.0, 0.0, 1.0};
  std::function<double(double, double)> angular_profile;  // (theta, phi)
  SpaceTimeFn forcing;                                    // F(t, |x|)
};

struct Result3D {
  Grid3D grid;
  double dt = 0.0;
  double t_final = 0.0;
  Field3 v;       // final level
  Field3 v_prev;  // level before it
  std::vector<std::pair<double, double>> energy_track;  // (t, x-space energy)
  std::vector<double> radial_mean;  // spherical mean of v at t_final, per rho
  double min_jacobian_det = 0.0;
  double envelope_max = 0.0;
  bool finite = true;
};

/// Linear wave evolution in flattened coordinates: the x-space operator is
/// pushed through the boundary-flattening map, giving variable-coefficient
/// corrections A = J J^T, B = Lap_x y supported in 1 <= |y| <= 3, and a
/// boundary condition m . grad v = 0 with m = J^T nu on the unit sphere
/// (pure d_rho v = 0 for a ball obstacle, tangential corrections otherwise).
Result3D run_3d_linear(const ObstacleShape& shape, const Options3D& opts);

/// Scenario wrapper used by the runner: evolves, writes energy.csv and the
/// radial cross-check (when the obstacle is a ball), and returns the
/// summary. `files` collects artifact names for the manifest.
RunSummary run_3d_scenario(const ScenarioConfig& cfg,
                           const std::string& out_dir,
                           std::vector<std::string>& files);

}  // namespace nullwave
