#include "nullwave/nullform.hpp"

#include <cmath>
#include <random>

#include "nullwave/errors.hpp"
#include "nullwave/sampling.hpp"

namespace nullwave {

namespace {
constexpr std::uint64_t kNullCheckSeed = 0x6e756c6cULL;
constexpr std::uint64_t kAdmissibleSeed = 0x61646d69ULL;
}  // namespace

NullFormSpec::NullFormSpec(const Mat4& s, const QTensor& q, CubicKind kind,
                           CubicHook hook, const Options& opts)
    : s_(s), q_(q), cubic_kind_(kind), hook_(std::move(hook)) {
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < a; ++b) {
      if (std::abs(s_[a][b] - s_[b][a]) > 1e-14)
        throw DomainError("S tensor must be symmetric");
      for (int m = 0; m < 4; ++m)
        if (std::abs(q_[a][b][m] - q_[b][a][m]) > 1e-14)
          throw DomainError("Q tensor must be symmetric in (alpha, beta)");
    }
  if (cubic_kind_ != CubicKind::None && !hook_.q_correction &&
      !hook_.s_remainder)
    throw DomainError("cubic hook kind set but no hook functions given");
  if (opts.enforce_assume) {
    for (int m = 0; m < 4; ++m)
      if (q_[0][0][m] != 0.0)
        throw DegeneracyError("normalization requires Q^{00} = 0");
    double sum = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int m = 0; m < 4; ++m) sum += std::abs(q_[a][b][m]);
    if (sum * opts.amplitude > 0.5)
      throw DegeneracyError(
          "sum |Q^{ab}| exceeds 1/2 over the intended amplitude range");
  }
}

NullFormSpec NullFormSpec::zero() {
  return NullFormSpec(Mat4{}, QTensor{});
}

bool NullFormSpec::is_zero() const {
  if (cubic_kind_ != CubicKind::None) return false;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (s_[a][b] != 0.0) return false;
      for (int m = 0; m < 4; ++m)
        if (q_[a][b][m] != 0.0) return false;
    }
  return true;
}

bool NullFormSpec::is_semilinear() const {
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 4; ++m)
        if (q_[a][b][m] != 0.0) return false;
  return !(cubic_kind_ != CubicKind::None && hook_.q_correction);
}

Mat4 NullFormSpec::q_of(const Vec4& du) const {
  Mat4 out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double v = 0.0;
      for (int m = 0; m < 4; ++m) v += q_[a][b][m] * du[m];
      out[a][b] = v;
    }
  if (hook_.q_correction) {
    const Mat4 corr = hook_.q_correction(du);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out[a][b] += corr[a][b];
  }
  return out;
}

double NullFormSpec::evaluate(const Vec4& du, const Mat4& d2u) const {
  double v = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v += s_[a][b] * du[a] * du[b];
  const Mat4 qc = q_of(du);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v += qc[a][b] * d2u[a][b];
  if (hook_.s_remainder) v += hook_.s_remainder(du);
  return v;
}

double NullFormSpec::s_symbol(const Vec4& w) const {
  double v = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v += s_[a][b] * w[a] * w[b];
  return v;
}

double NullFormSpec::q_symbol(const Vec4& w) const {
  double v = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 4; ++m) v += q_[a][b][m] * w[m] * w[a] * w[b];
  return v;
}

std::optional<double> NullFormSpec::cubic_symbol(const Vec4& w) const {
  if (!hook_.cone_symbol) return std::nullopt;
  return hook_.cone_symbol(w);
}

ConditionVerdict check_null(const NullFormSpec& spec, double tol,
                            std::size_t n_samples) {
  if (!(tol > 0.0)) throw DomainError("check_null requires tol > 0");
  if (n_samples < 64) throw DomainError("check_null requires n_samples >= 64");
  ConditionVerdict verdict;
  const auto dirs = unit_directions(n_samples, kNullCheckSeed);
  for (const auto& wv : dirs) {
    for (const double w0 : {1.0, -1.0}) {
      const Vec4 w{w0, wv[0], wv[1], wv[2]};
      double res = std::max(std::abs(spec.s_symbol(w)),
                            std::abs(spec.q_symbol(w)));
      if (const auto cs = spec.cubic_symbol(w))
        res = std::max(res, std::abs(*cs));
      if (res > verdict.max_residual) {
        verdict.max_residual = res;
        verdict.witness_omega = w;
      }
    }
  }
  verdict.holds = verdict.max_residual <= tol;
  return verdict;
}

ConditionVerdict check_admissible(const NullFormSpec& spec,
                                  const ObstacleShape& shape, double tol,
                                  std::size_t n_samples) {
  if (!(tol > 0.0)) throw DomainError("check_admissible requires tol > 0");
  ConditionVerdict verdict;
  const auto dirs = unit_directions(std::max<std::size_t>(n_samples, 26),
                                    kAdmissibleSeed);
  std::mt19937_64 rng(kAdmissibleSeed ^ 0x5a5a5a5aULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (const auto& w : dirs) {
    const Vec3 nu = shape.outward_normal(w);
    // First-order jets with vanishing normal derivative: spatial parts
    // projected onto the tangent plane of the surface point.
    Vec3 pv = random_unit(rng), qv = random_unit(rng);
    pv = sub(pv, scale(nu, dot(nu, pv)));
    qv = sub(qv, scale(nu, dot(nu, qv)));
    const Vec4 p{unif(rng), pv[0], pv[1], pv[2]};
    const Vec4 q{unif(rng), qv[0], qv[1], qv[2]};
    const Mat4 qp = spec.q_of(p);
    double val = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int b = 0; b < 4; ++b) val += qp[i + 1][b] * nu[i] * q[b];
    if (std::abs(val) > verdict.max_residual) {
      verdict.max_residual = std::abs(val);
      verdict.witness_p = p;
      verdict.witness_q = q;
      verdict.witness_nu = nu;
    }
  }
  verdict.holds = verdict.max_residual <= tol;
  return verdict;
}

bool s_null_algebraic(const Mat4& s, double tol) {
  for (int i = 1; i < 4; ++i)
    if (std::abs(s[0][i]) > tol || std::abs(s[i][0]) > tol) return false;
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j < 4; ++j) {
      const double want = (i == j) ? -s[0][0] : 0.0;
      if (std::abs(s[i][j] - want) > tol) return false;
    }
  return true;
}

NullFormSpec chaplygin_spec() {
  QTensor q{};
  for (int i = 1; i < 4; ++i) {
    q[0][i][i] = -1.0;  // -2 d_i phi d^2_{0i} phi (with the (0i)+(i0) pair)
    q[i][0][i] = -1.0;
    q[i][i][0] = 2.0;   // 2 d_0 phi Lap phi
  }
  CubicHook hook;
  hook.q_correction = [](const Vec4& du) {
    Mat4 m{};
    const double g2 = du[1] * du[1] + du[2] * du[2] + du[3] * du[3];
    for (int i = 1; i < 4; ++i)
      for (int j = 1; j < 4; ++j)
        m[i][j] = -du[i] * du[j] + (i == j ? g2 : 0.0);
    return m;
  };
  hook.cone_symbol = [](const Vec4& w) {
    // Literal transcription: -w_i w_j w_i w_j + |w|^2 |w|^2 on the spatial part.
    double quad = 0.0, g2 = 0.0;
    for (int i = 1; i < 4; ++i) g2 += w[i] * w[i];
    for (int i = 1; i < 4; ++i)
      for (int j = 1; j < 4; ++j) quad += -w[i] * w[j] * w[i] * w[j];
    return quad + g2 * g2;
  };
  return NullFormSpec(Mat4{}, q, CubicKind::Chaplygin, std::move(hook),
                      {.enforce_assume = true, .amplitude = 1.0 / 24.0});
}

NullFormSpec null_q0_spec() {
  Mat4 s{};
  s[0][0] = 1.0;
  for (int i = 1; i < 4; ++i) s[i][i] = -1.0;
  return NullFormSpec(s, QTensor{});
}

NullFormSpec nonnull_dt2_spec() {
  Mat4 s{};
  s[0][0] = 1.0;
  return NullFormSpec(s, QTensor{});
}

}  // namespace nullwave
