#include "nullwave/radial_grid.hpp"

#include <numbers>

namespace nullwave {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

double l2_norm(const RadialGrid& g, const Field& f) {
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double w = (j == 0 || j + 1 == g.n) ? 0.5 : 1.0;
    const double r = g.r(j);
    acc += w * f[j] * f[j] * r * r;
  }
  return std::sqrt(kFourPi * acc * g.dr);
}

double l2_norm_weighted(const RadialGrid& g, const Field& f,
                        const std::function<double(double)>& wfun) {
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double w = (j == 0 || j + 1 == g.n) ? 0.5 : 1.0;
    const double r = g.r(j);
    const double v = f[j] * wfun(r);
    acc += w * v * v * r * r;
  }
  return std::sqrt(kFourPi * acc * g.dr);
}

double volume_integral(const RadialGrid& g, const Field& f) {
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double w = (j == 0 || j + 1 == g.n) ? 0.5 : 1.0;
    const double r = g.r(j);
    acc += w * f[j] * r * r;
  }
  return kFourPi * acc * g.dr;
}

Field deriv(const RadialGrid& g, const Field& f) {
  Field d(g.n);
  const double h = g.dr;
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t j = 1; j + 1 < g.n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
  d[g.n - 1] = (3.0 * f[g.n - 1] - 4.0 * f[g.n - 2] + f[g.n - 3]) / (2.0 * h);
  return d;
}

Field deriv2(const RadialGrid& g, const Field& f) {
  Field d(g.n);
  const double h2 = g.dr * g.dr;
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  for (std::size_t j = 1; j + 1 < g.n; ++j)
    d[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / h2;
  d[g.n - 1] =
      (2.0 * f[g.n - 1] - 5.0 * f[g.n - 2] + 4.0 * f[g.n - 3] - f[g.n - 4]) / h2;
  return d;
}

Field deriv_neumann(const RadialGrid& g, const Field& f, double g0) {
  Field d = deriv(g, f);
  d[0] = g0;  // ghost f_{-1} = f_1 - 2 dr g0 makes the centered value exact
  return d;
}

Field deriv2_neumann(const RadialGrid& g, const Field& f, double g0) {
  Field d = deriv2(g, f);
  const double ghost = f[1] - 2.0 * g.dr * g0;
  d[0] = (f[1] - 2.0 * f[0] + ghost) / (g.dr * g.dr);
  return d;
}

}  // namespace nullwave
