#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nullwave/nullform.hpp"
#include "nullwave/radial_grid.hpp"

namespace nullwave {

using SpaceTimeFn = std::function<double(double, double)>;

/// Klainerman-type vector fields. In the radial representation spatial
/// translations enter through their radial contraction d_r, and rotations
/// annihilate every field identically.
struct VectorFieldOp {
  enum class Kind { Translation, Rotation, Scaling, ModifiedScaling };
  Kind kind = Kind::Translation;
  int i = 0;  // Translation: alpha in 0..3. Rotation: first spatial index.
  int j = 0;  // Rotation: second spatial index.

  static VectorFieldOp translation(int alpha) { return {Kind::Translation, alpha, 0}; }
  static VectorFieldOp rotation(int i, int j) { return {Kind::Rotation, i, j}; }
  static VectorFieldOp scaling() { return {Kind::Scaling, 0, 0}; }
  static VectorFieldOp modified_scaling() { return {Kind::ModifiedScaling, 0, 0}; }
};

/// An odd number of consecutive time levels of a radial field, centered at
/// time t_center with spacing dt. Each vector-field application trims one
/// level from each side (time stencils are centered).
struct HistoryStack {
  std::vector<Field> levels;
  double t_center = 0.0;
  double dt = 0.0;

  std::size_t depth() const { return levels.size(); }
  const Field& center() const { return levels[levels.size() / 2]; }
  double time_of(std::size_t k) const {
    return t_center + (double(k) - double(levels.size() / 2)) * dt;
  }
};

/// Second-order discrete application of one vector field. Requires depth
/// >= 3; the result has depth - 2 levels. Compositions up to total order 2
/// are supported by starting from a depth-7 stack.
HistoryStack apply_field(const VectorFieldOp& op, const HistoryStack& h,
                         const RadialGrid& grid);

/// Energy form e_0(u) = |du|^2 + 2 h^{0b} d_0u d_bu - h^{ab} d_au d_bu.
double energy_form_e0(const Vec4& du, const Mat4& h);

/// Energies indexed by (mu, nu) with mu + nu <= 2, in the order
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
using EnergyOrders = std::array<double, 6>;
int energy_order_index(int mu, int nu);

/// One sampled diagnostics row: every measured functional at one time.
struct EnergyReport {
  double t = 0.0;
  double e0_integral = 0.0;        // curly-E_{0,0}
  EnergyOrders curly_e{};          // modified-scaling/time family
  EnergyOrders kl_e{};             // scaling/translation (Z) family
  double kss_lhs = 0.0;
  double kss_rhs = 0.0;
  double kss_ratio = 0.0;
  double local_energy_r5 = 0.0;
  double envelope_d = 0.0;
  double sup_du = 0.0;
  double hardy_ratio = 0.0;
  int blowup_flag = 0;
};

struct DiagnosticsReport {
  std::vector<EnergyReport> rows;
};

struct DiagnosticsOptions {
  int order_cap = 2;
  double local_radius = 5.0;
};

/// Accumulates the time-space (KSS) quadratures step by step and produces
/// sampled rows from a depth-7 window.
class DiagnosticsAccumulator {
public:
  using Options = DiagnosticsOptions;

  DiagnosticsAccumulator(const RadialGrid& grid, const NullFormSpec& spec,
                         Options opts = {});

  /// Call once per completed step with the centered 3-stack at the new
  /// center level; integrates the KSS left/right-hand sides.
  void accumulate(const HistoryStack& w3, const SpaceTimeFn* forcing);

  /// Full diagnostics row from a depth-7 window.
  EnergyReport sample(const HistoryStack& w7, const SpaceTimeFn* forcing) const;

private:
  const RadialGrid& grid_;
  const NullFormSpec& spec_;
  Options opts_;
  double kss_lhs_sq_ = 0.0;
  double kss_rhs_ = 0.0;
};

/// D(t) = max over nodes of (1 + t + r) (|u| + |du|).
double envelope_d(const RadialGrid& grid, const Field& u, const Field& du_t,
                  const Field& du_r, double t);

struct HardyResult {
  double ratio = 0.0;
  bool degenerate = false;
};

/// ||v/r|| / ||d_r v||; the Hardy bound for the exterior domain is 2.
HardyResult hardy_check(const RadialGrid& grid, const Field& v);

/// Measured constant of the null-form pointwise bound:
/// max over nodes of |S^{ab} d_a w d_b v| <r> / (|Gw||dv| + |dw||Gv|),
/// Gamma = {translations, rotations, scaling} at order 1. Nodes where the
/// denominator is below 1e-14 are skipped.
double null_bound_constant(const NullFormSpec& spec, const RadialGrid& grid,
                           const HistoryStack& w3, const HistoryStack& v3);

struct DecayFit {
  double rate = 0.0;       // c in ||du||_{loc} ~ exp(-c t)
  double r_squared = 0.0;
  std::size_t n_points = 0;
  bool degenerate = false;
};

/// Least-squares exponential fit of the local energy over t in
/// [t_lo, end of run]. The fit is truncated where the signal falls below
/// max(floor, rel_floor * series peak): past that point the scheme's
/// dispersion tail dominates and the exponential regime has ended.
DecayFit local_energy_decay_fit(const DiagnosticsReport& report,
                                double t_lo = 5.0, double floor = 1e-14,
                                double rel_floor = 1e-6);

/// kss_ratio of the row nearest to time T.
std::optional<double> kss_ratio_at(const DiagnosticsReport& report, double T);

void write_diagnostics_csv(std::ostream& os, const DiagnosticsReport& report);

}  // namespace nullwave
