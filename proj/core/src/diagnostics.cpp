#include "nullwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "nullwave/errors.hpp"
#include "nullwave/geometry.hpp"

namespace nullwave {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

Field time_deriv(const HistoryStack& h, std::size_t k) {
  const Field& fp = h.levels[k + 1];
  const Field& fm = h.levels[k - 1];
  Field g(fp.size());
  const double inv = 1.0 / (2.0 * h.dt);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = (fp[j] - fm[j]) * inv;
  return g;
}

struct CenterJets {
  Field du_t, du_r, d00, d0r, drr;
};

CenterJets center_jets(const HistoryStack& h, const RadialGrid& grid) {
  if (h.depth() < 3) throw StagingError("need >= 3 levels for jets");
  const std::size_t c = h.depth() / 2;
  CenterJets out;
  out.du_t = time_deriv(h, c);
  out.du_r = deriv(grid, h.levels[c]);
  const double dt2 = h.dt * h.dt;
  out.d00.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j)
    out.d00[j] =
        (h.levels[c + 1][j] - 2.0 * h.levels[c][j] + h.levels[c - 1][j]) / dt2;
  out.d0r = deriv(grid, out.du_t);
  out.drr = deriv2(grid, h.levels[c]);
  return out;
}

}  // namespace

HistoryStack apply_field(const VectorFieldOp& op, const HistoryStack& h,
                         const RadialGrid& grid) {
  if (h.depth() < 3)
    throw StagingError("apply_field needs at least 3 stored levels");
  HistoryStack out;
  out.t_center = h.t_center;
  out.dt = h.dt;
  out.levels.reserve(h.depth() - 2);
  for (std::size_t k = 1; k + 1 < h.depth(); ++k) {
    const Field& f = h.levels[k];
    const double tk = h.time_of(k);
    Field g;
    switch (op.kind) {
      case VectorFieldOp::Kind::Translation:
        if (op.i == 0) {
          g = time_deriv(h, k);
        } else {
          g = deriv(grid, f);  // radial contraction of d_i
        }
        break;
      case VectorFieldOp::Kind::Rotation:
        g.assign(grid.n, 0.0);  // rotations annihilate radial fields
        break;
      case VectorFieldOp::Kind::Scaling: {
        g = time_deriv(h, k);
        const Field dr = deriv(grid, f);
        for (std::size_t j = 0; j < grid.n; ++j)
          g[j] = tk * g[j] + grid.r(j) * dr[j];
        break;
      }
      case VectorFieldOp::Kind::ModifiedScaling: {
        g = time_deriv(h, k);
        const Field dr = deriv(grid, f);
        for (std::size_t j = 0; j < grid.n; ++j) {
          const double r = grid.r(j);
          g[j] = tk * g[j] + CutoffProfile::value(r) * r * dr[j];
        }
        break;
      }
    }
    out.levels.push_back(std::move(g));
  }
  return out;
}

double energy_form_e0(const Vec4& du, const Mat4& h) {
  double e = 0.0;
  for (int a = 0; a < 4; ++a) e += du[a] * du[a];
  for (int b = 0; b < 4; ++b) e += 2.0 * h[0][b] * du[0] * du[b];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) e -= h[a][b] * du[a] * du[b];
  return e;
}

int energy_order_index(int mu, int nu) {
  if (mu == 0 && nu == 0) return 0;
  if (mu == 1 && nu == 0) return 1;
  if (mu == 0 && nu == 1) return 2;
  if (mu == 2 && nu == 0) return 3;
  if (mu == 1 && nu == 1) return 4;
  if (mu == 0 && nu == 2) return 5;
  throw DomainError("energy order out of the mu + nu <= 2 cap");
}

DiagnosticsAccumulator::DiagnosticsAccumulator(const RadialGrid& grid,
                                               const NullFormSpec& spec,
                                               Options opts)
    : grid_(grid), spec_(spec), opts_(opts) {}

void DiagnosticsAccumulator::accumulate(const HistoryStack& w3,
                                        const SpaceTimeFn* forcing) {
  const CenterJets jets = center_jets(w3, grid_);
  const double t = w3.t_center;
  double lhs = 0.0;
  Field box(grid_.n, 0.0);
  const bool nonlinear = !spec_.is_zero();
  for (std::size_t j = 0; j < grid_.n; ++j) {
    const double r = grid_.r(j);
    const double w = (j == 0 || j + 1 == grid_.n) ? 0.5 : 1.0;
    const double gsq = jets.du_t[j] * jets.du_t[j] + jets.du_r[j] * jets.du_r[j];
    lhs += w * gsq / std::sqrt(1.0 + r * r) * r * r;
    double b = 0.0;
    if (nonlinear) {
      const Vec4 du{jets.du_t[j], jets.du_r[j], 0.0, 0.0};
      Mat4 d2u{};
      d2u[0][0] = jets.d00[j];
      d2u[0][1] = d2u[1][0] = jets.d0r[j];
      d2u[1][1] = jets.drr[j];
      d2u[2][2] = d2u[3][3] = jets.du_r[j] / r;
      b = spec_.evaluate(du, d2u);
    }
    if (forcing && *forcing) b += (*forcing)(t, r);
    box[j] = b;
  }
  kss_lhs_sq_ += w3.dt * kFourPi * lhs * grid_.dr;
  kss_rhs_ += w3.dt * l2_norm(grid_, box);
}

EnergyReport DiagnosticsAccumulator::sample(const HistoryStack& w7,
                                            const SpaceTimeFn* forcing) const {
  (void)forcing;
  if (w7.depth() < 7)
    throw StagingError("diagnostics sample needs a depth-7 window");
  EnergyReport row;
  row.t = w7.t_center;

  // Jets of the base solution at the window center.
  HistoryStack w3{{w7.levels[2], w7.levels[3], w7.levels[4]}, w7.t_center, w7.dt};
  const CenterJets jets = center_jets(w3, grid_);

  // h^{ab} = -Q^{ab}(du); only the (0,0) and (1,1) entries act on the
  // radially contracted first jets.
  Field h00(grid_.n, 0.0), h11(grid_.n, 0.0);
  const bool quasi = !spec_.is_semilinear();
  if (quasi) {
    for (std::size_t j = 0; j < grid_.n; ++j) {
      const Vec4 du{jets.du_t[j], jets.du_r[j], 0.0, 0.0};
      const Mat4 q = spec_.q_of(du);
      h00[j] = -q[0][0];
      h11[j] = -q[1][1];
    }
  }

  auto e0_integral = [&](const HistoryStack& stack) {
    const std::size_t c = stack.depth() / 2;
    const Field drf = deriv(grid_, stack.levels[c]);
    double acc = 0.0;
    for (std::size_t j = 0; j < grid_.n; ++j) {
      const double a =
          (stack.levels[c + 1][j] - stack.levels[c - 1][j]) / (2.0 * stack.dt);
      const double b = drf[j];
      const double w = (j == 0 || j + 1 == grid_.n) ? 0.5 : 1.0;
      const double e = a * a + b * b + h00[j] * a * a - h11[j] * b * b;
      const double r = grid_.r(j);
      acc += w * e * r * r;
    }
    return kFourPi * acc * grid_.dr;
  };

  auto composed = [&](const std::vector<VectorFieldOp>& ops) {
    HistoryStack s = w7;
    for (const auto& op : ops) s = apply_field(op, s, grid_);
    return e0_integral(s);
  };

  const auto d0 = VectorFieldOp::translation(0);
  const auto dr = VectorFieldOp::translation(1);
  const auto big_l = VectorFieldOp::scaling();
  const auto mod_l = VectorFieldOp::modified_scaling();

  // curly-E_{mu,nu}: sums of e_0(modL^i d_0^j u), i <= mu, j <= nu.
  auto curly_term = [&](int i, int j) {
    std::vector<VectorFieldOp> ops;
    for (int k = 0; k < i; ++k) ops.push_back(mod_l);
    for (int k = 0; k < j; ++k) ops.push_back(d0);
    return composed(ops);
  };
  // E_{mu,nu}: sums over L^i Z^alpha with the radial Z-family {d_0, d_r}
  // (rotations vanish identically on radial fields).
  auto kl_term = [&](int i, int a, int b) {
    std::vector<VectorFieldOp> ops;
    for (int k = 0; k < i; ++k) ops.push_back(big_l);
    for (int k = 0; k < a; ++k) ops.push_back(d0);
    for (int k = 0; k < b; ++k) ops.push_back(dr);
    return composed(ops);
  };

  std::array<std::array<double, 3>, 3> curly_single{};
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; i + j <= 2; ++j) curly_single[i][j] = curly_term(i, j);
  std::array<std::array<double, 3>, 3> kl_single{};
  for (int i = 0; i <= 2; ++i) {
    for (int m = 0; i + m <= 2; ++m) {
      double sum = 0.0;
      for (int a = 0; a <= m; ++a) sum += kl_term(i, a, m - a);
      kl_single[i][m] = sum;
    }
  }
  for (int mu = 0; mu <= 2; ++mu)
    for (int nu = 0; mu + nu <= 2; ++nu) {
      double ce = 0.0, ke = 0.0;
      for (int i = 0; i <= mu; ++i)
        for (int j = 0; j <= nu; ++j) {
          if (i + j <= 2) {
            ce += curly_single[i][j];
            ke += kl_single[i][j];
          }
        }
      row.curly_e[energy_order_index(mu, nu)] = ce;
      row.kl_e[energy_order_index(mu, nu)] = ke;
    }
  row.e0_integral = row.curly_e[0];

  // KSS track with the logarithmic normalization at the current horizon.
  const double T = std::max(row.t, 0.0);
  row.kss_lhs = std::sqrt(kss_lhs_sq_) / std::sqrt(std::log(2.0 + T));
  row.kss_rhs = kss_rhs_;
  row.kss_ratio = row.kss_rhs > 0.0 ? row.kss_lhs / row.kss_rhs : 0.0;

  double local = 0.0;
  double sup_du = 0.0, sup_u = 0.0;
  for (std::size_t j = 0; j < grid_.n; ++j) {
    const double r = grid_.r(j);
    const double gsq = jets.du_t[j] * jets.du_t[j] + jets.du_r[j] * jets.du_r[j];
    if (r <= opts_.local_radius) {
      const double w = (j == 0) ? 0.5 : 1.0;
      local += w * gsq * r * r;
    }
    sup_du = std::max(sup_du, std::max(std::abs(jets.du_t[j]), std::abs(jets.du_r[j])));
    sup_u = std::max(sup_u, std::abs(w3.center()[j]));
  }
  row.local_energy_r5 = std::sqrt(kFourPi * local * grid_.dr);
  row.sup_du = sup_du;
  row.envelope_d = envelope_d(grid_, w3.center(), jets.du_t, jets.du_r, row.t);
  // Coherence of the envelope with the sup norms, true by construction.
  const double upper =
      (1.0 + row.t + grid_.r_max()) * (sup_u + 2.0 * sup_du) + 1e-12;
  if (row.envelope_d > upper)
    throw Error("envelope/energy coherence violated");
  row.hardy_ratio = hardy_check(grid_, w3.center()).ratio;
  return row;
}

double envelope_d(const RadialGrid& grid, const Field& u, const Field& du_t,
                  const Field& du_r, double t) {
  double d = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double r = grid.r(j);
    const double mag =
        std::abs(u[j]) + std::sqrt(du_t[j] * du_t[j] + du_r[j] * du_r[j]);
    d = std::max(d, (1.0 + t + r) * mag);
  }
  return d;
}

HardyResult hardy_check(const RadialGrid& grid, const Field& v) {
  Field over_r(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) over_r[j] = v[j] / grid.r(j);
  const double num = l2_norm(grid, over_r);
  const double den = l2_norm(grid, deriv(grid, v));
  if (den < 1e-300 || num < 1e-300) return {0.0, true};
  return {num / den, false};
}

double null_bound_constant(const NullFormSpec& spec, const RadialGrid& grid,
                           const HistoryStack& w3, const HistoryStack& v3) {
  const CenterJets wj = center_jets(w3, grid);
  const CenterJets vj = center_jets(v3, grid);
  const Mat4& s = spec.s_tensor();
  const double t = w3.t_center;
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double r = grid.r(j);
    const Vec4 dw{wj.du_t[j], wj.du_r[j], 0.0, 0.0};
    const Vec4 dv{vj.du_t[j], vj.du_r[j], 0.0, 0.0};
    double num = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) num += s[a][b] * dw[a] * dv[b];
    const double lw = t * wj.du_t[j] + r * wj.du_r[j];
    const double lv = t * vj.du_t[j] + r * vj.du_r[j];
    const double gw = std::sqrt(dw[0] * dw[0] + dw[1] * dw[1] + lw * lw);
    const double gv = std::sqrt(dv[0] * dv[0] + dv[1] * dv[1] + lv * lv);
    const double pw = std::sqrt(dw[0] * dw[0] + dw[1] * dw[1]);
    const double pv = std::sqrt(dv[0] * dv[0] + dv[1] * dv[1]);
    const double den = gw * pv + pw * gv;
    if (den < 1e-14) continue;
    worst = std::max(worst, std::abs(num) * std::sqrt(1.0 + r * r) / den);
  }
  return worst;
}

DecayFit local_energy_decay_fit(const DiagnosticsReport& report, double t_lo,
                                double floor, double rel_floor) {
  DecayFit fit;
  double peak = 0.0;
  for (const auto& row : report.rows)
    peak = std::max(peak, row.local_energy_r5);
  const double cutoff = std::max(floor, rel_floor * peak);
  std::vector<double> ts, ys;
  for (const auto& row : report.rows) {
    if (row.t < t_lo) continue;
    if (row.local_energy_r5 <= cutoff) break;  // floor crossing: truncate
    ts.push_back(row.t);
    ys.push_back(std::log(row.local_energy_r5));
  }
  fit.n_points = ts.size();
  if (ts.size() < 5) {
    fit.degenerate = true;
    return fit;
  }
  const double n = double(ts.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    st += ts[k];
    sy += ys[k];
    stt += ts[k] * ts[k];
    sty += ts[k] * ys[k];
  }
  const double denom = n * stt - st * st;
  if (std::abs(denom) < 1e-300) {
    fit.degenerate = true;
    return fit;
  }
  const double slope = (n * sty - st * sy) / denom;
  const double inter = (sy - slope * st) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double pred = inter + slope * ts[k];
    ss_res += (ys[k] - pred) * (ys[k] - pred);
    ss_tot += (ys[k] - mean) * (ys[k] - mean);
  }
  fit.rate = -slope;
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

std::optional<double> kss_ratio_at(const DiagnosticsReport& report, double T) {
  const EnergyReport* best = nullptr;
  double dist = 1e300;
  for (const auto& row : report.rows) {
    const double d = std::abs(row.t - T);
    if (d < dist) {
      dist = d;
      best = &row;
    }
  }
  if (!best) return std::nullopt;
  return best->kss_ratio;
}

void write_diagnostics_csv(std::ostream& os, const DiagnosticsReport& report) {
  os << "t,E00,cE10,cE01,cE20,cE11,cE02,E10,E01,E20,E11,E02,"
        "kss_lhs,kss_rhs,kss_ratio,localE_r5,envelope_D,sup_du,hardy_ratio,"
        "blowup_flag\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    os << buf;
  };
  for (const auto& r : report.rows) {
    put(r.t, ',');
    put(r.e0_integral, ',');
    put(r.curly_e[1], ',');
    put(r.curly_e[2], ',');
    put(r.curly_e[3], ',');
    put(r.curly_e[4], ',');
    put(r.curly_e[5], ',');
    put(r.kl_e[1], ',');
    put(r.kl_e[2], ',');
    put(r.kl_e[3], ',');
    put(r.kl_e[4], ',');
    put(r.kl_e[5], ',');
    put(r.kss_lhs, ',');
    put(r.kss_rhs, ',');
    put(r.kss_ratio, ',');
    put(r.local_energy_r5, ',');
    put(r.envelope_d, ',');
    put(r.sup_du, ',');
    put(r.hardy_ratio, ',');
    os << r.blowup_flag << "\n";
  }
}

}  // namespace nullwave
