#include "nullwave/initial.hpp"

#include <cmath>

#include "nullwave/errors.hpp"

namespace nullwave {

double Bump::value(double r) const {
  const double s = (r - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  return amplitude * std::exp(-1.0 / (1.0 - s * s));
}

double Bump::d1(double r) const {
  const double s = (r - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  const double m = 1.0 - s * s;
  return value(r) * (-2.0 * s / (m * m)) / width;
}

double Bump::d2(double r) const {
  const double s = (r - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  const double m = 1.0 - s * s;
  const double e = 4.0 * s * s / (m * m * m * m) - 2.0 / (m * m) -
                   8.0 * s * s / (m * m * m);
  return value(r) * e / (width * width);
}

InitialData make_bump_data(const RadialGrid& grid, double boundary_clearance,
                           const BumpDataSpec& spec) {
  if (!(spec.width > 0.0)) throw ConfigError("data.width", "must be positive");
  if (!(spec.epsilon >= 0.0))
    throw ConfigError("data.epsilon", "must be nonnegative");
  if (!(spec.center - spec.width > boundary_clearance))
    throw ConfigError("data",
                      "bump support overlaps the obstacle boundary; "
                      "center - width must exceed max b(omega)");
  if (spec.center + spec.width > grid.r_max())
    throw ConfigError("data", "bump support exceeds the grid");
  InitialData d;
  d.epsilon = spec.epsilon;
  d.support_radius = spec.center + spec.width;
  d.u0 = grid.zeros();
  d.u1 = grid.zeros();
  const Bump b0{spec.center, spec.width, spec.u0_amp};
  const Bump b1{spec.center, spec.width, spec.u1_amp};
  for (std::size_t j = 0; j < grid.n; ++j) {
    d.u0[j] = b0.value(grid.r(j));
    d.u1[j] = b1.value(grid.r(j));
  }
  return d;
}

CompatibilitySequence build_psi2(
    const InitialData& data, const NullFormSpec& spec, const RadialGrid& grid,
    const std::function<double(double, double)>* forcing) {
  const double eps = data.epsilon;
  CompatibilitySequence seq;
  seq.psis[0] = data.u0;
  seq.psis[1] = data.u1;
  for (std::size_t j = 0; j < grid.n; ++j) {
    seq.psis[0][j] *= eps;
    seq.psis[1][j] *= eps;
  }
  const Field du0r = deriv(grid, seq.psis[0]);
  const Field du0rr = deriv2(grid, seq.psis[0]);
  const Field du1r = deriv(grid, seq.psis[1]);

  Field psi2(grid.n, 0.0);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double r = grid.r(j);
    const double lap = du0rr[j] + 2.0 * du0r[j] / r;
    // Jets at t = 0 along the radial axis; d2u[0][0] is the unknown.
    const Vec4 du{seq.psis[1][j], du0r[j], 0.0, 0.0};
    Mat4 d2u{};
    d2u[0][1] = d2u[1][0] = du1r[j];
    d2u[1][1] = du0rr[j];
    d2u[2][2] = d2u[3][3] = du0r[j] / r;
    double n_partial = spec.evaluate(du, d2u);
    if (forcing && *forcing) n_partial += (*forcing)(0.0, r);
    const double coeff = 1.0 - spec.q_of(du)[0][0];
    if (std::abs(coeff) < 1e-6)
      throw DegeneracyError("coefficient of d_0^2 u degenerated at t = 0");
    psi2[j] = (lap + n_partial) / coeff;
  }
  seq.psis[2] = std::move(psi2);
  return seq;
}

int check_compatibility_order(const CompatibilitySequence& seq,
                              const RadialGrid& grid, double tol) {
  int order = 0;
  for (const auto& psi : seq.psis) {
    const double dn =
        (-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) / (2.0 * grid.dr);
    if (std::abs(dn) > tol) break;
    ++order;
  }
  return order;
}

double weighted_data_norm(const InitialData& data, const RadialGrid& grid) {
  auto w = [](double r, int k) {
    return std::pow(std::sqrt(1.0 + r * r), double(k));
  };
  const Field u0r = deriv(grid, data.u0);
  const Field u0rr = deriv2(grid, data.u0);
  const Field u1r = deriv(grid, data.u1);
  const Field u1rr = deriv2(grid, data.u1);

  // Radial reductions of the derivative families: |grad u| = |u'| and
  // sum |d_i d_j u|^2 = u''^2 + 2 (u'/r)^2 for radial u.
  auto order2 = [&](const Field& fr, const Field& frr, std::size_t j) {
    const double a = frr[j];
    const double b = fr[j] / grid.r(j);
    return std::sqrt(a * a + 2.0 * b * b);
  };

  double total = 0.0;
  for (int k = 0; k <= 2; ++k) {
    Field f0(grid.n), f1(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double r = grid.r(j);
      double g0, g1;
      if (k == 0) {
        g0 = data.u0[j];
        g1 = data.u1[j];
      } else if (k == 1) {
        g0 = std::abs(u0r[j]);
        g1 = std::abs(u1r[j]);
      } else {
        g0 = order2(u0r, u0rr, j);
        g1 = order2(u1r, u1rr, j);
      }
      f0[j] = g0 * w(r, k);
      f1[j] = g1 * w(r, k + 1);
    }
    total += l2_norm(grid, f0) + l2_norm(grid, f1);
  }
  return total;
}

}  // namespace nullwave
