#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "nullwave/geometry.hpp"
#include "nullwave/tensors.hpp"

namespace nullwave {

/// Higher-order remainder of the nonlinearity: an O(|du|^2) correction to the
/// quasilinear coefficients Q^{ab}(du) plus an O(|du|^3) semilinear remainder.
/// `cone_symbol` evaluates the remainder's symbol at a cone direction so the
/// null checker can include it; hooks without one are skipped there.
struct CubicHook {
  std::function<Mat4(const Vec4&)> q_correction;
  std::function<double(const Vec4&)> s_remainder;
  std::function<double(const Vec4&)> cone_symbol;
};

enum class CubicKind { None, Chaplygin, Custom };

/// Result of a structural check. On failure, `witness` pins the sample at
/// which the defining expression is |residual| > tol.
struct ConditionVerdict {
  bool holds = true;
  double max_residual = 0.0;
  // Null check: the on-cone direction. Admissible check: the tangent jets.
  Vec4 witness_omega{};
  Vec4 witness_p{};
  Vec4 witness_q{};
  Vec3 witness_nu{};
};

/// Construction-time checks for NullFormSpec.
struct SpecOptions {
  // Require the local-solvability normalization: Q^{00} = 0 and
  // sum |Q^{ab}(du)| <= 1/2 over the given amplitude range.
  bool enforce_assume = false;
  double amplitude = 1.0;
};

/// The nonlinearity N(du, d2u) = S^{ab} du_a du_b + Q^{ab}(du) d2u_{ab}
/// as explicit constant tensors plus an optional cubic remainder.
class NullFormSpec {
public:
  using Options = SpecOptions;

  /// Rejects tensors that are not symmetric in (alpha, beta).
  NullFormSpec(const Mat4& s, const QTensor& q, CubicKind kind = CubicKind::None,
               CubicHook hook = {}, const Options& opts = {});

  static NullFormSpec zero();

  const Mat4& s_tensor() const { return s_; }
  const QTensor& q_tensor() const { return q_; }
  CubicKind cubic_kind() const { return cubic_kind_; }
  bool is_zero() const;
  bool is_semilinear() const;  // no d2u dependence at all

  /// Q^{ab}(du): linear tensor part plus the hook's quadratic correction.
  Mat4 q_of(const Vec4& du) const;

  /// Full nonlinearity value at first/second-order jets (d2u symmetric).
  double evaluate(const Vec4& du, const Mat4& d2u) const;

  /// Quadratic symbols at a 4-direction.
  double s_symbol(const Vec4& omega) const;
  double q_symbol(const Vec4& omega) const;
  /// Symbol of the cubic hook, when the hook provides one.
  std::optional<double> cubic_symbol(const Vec4& omega) const;

private:
  Mat4 s_{};
  QTensor q_{};
  CubicKind cubic_kind_ = CubicKind::None;
  CubicHook hook_{};
};

/// Samples S^{ab} w_a w_b and Q^{ab}_m w_m w_a w_b (plus the hook symbol) on
/// the light cone w = (+-1, unit vector). 26 lattice directions first, then
/// seeded draws; deterministic. Requires tol > 0, n_samples >= 64.
ConditionVerdict check_null(const NullFormSpec& spec, double tol = 1e-12,
                            std::size_t n_samples = 256);

/// Samples Q^{ab}(p) nu^a q_b over surface points of the obstacle with
/// random first-order jets p, q whose spatial parts are tangent
/// (nu.p = nu.q = 0, the jet encoding of vanishing normal derivatives).
ConditionVerdict check_admissible(const NullFormSpec& spec,
                                  const ObstacleShape& shape,
                                  double tol = 1e-12,
                                  std::size_t n_samples = 256);

/// Closed-form criterion for the semilinear part only: S^{0i} = 0 and
/// S^{ij} = -S^{00} delta_{ij}. Cross-check for the sampled decision.
bool s_null_algebraic(const Mat4& s, double tol = 1e-12);

/// Tensors of the Chaplygin potential-flow equation
/// Box phi = -2 d_i phi d^2_{0i} phi - d_i phi d_j phi d^2_{ij} phi
///           + (2 d_0 phi + |grad phi|^2) Lap phi.
NullFormSpec chaplygin_spec();

/// Classical semilinear null form (d_0 u)^2 - |grad u|^2.
NullFormSpec null_q0_spec();

/// (d_0 u)^2, the standard non-null contrast case.
NullFormSpec nonnull_dt2_spec();

}  // namespace nullwave
