#include "nullwave/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "nullwave/errors.hpp"

namespace nullwave {

double simpson(const std::function<double(double)>& f, double a, double b,
               double step) {
  if (!(b > a)) return 0.0;
  const auto half = static_cast<std::size_t>(
      std::max(1.0, std::ceil((b - a) / (2.0 * step))));
  const std::size_t n = 2 * half;
  const double h = (b - a) / double(n);
  double acc = f(a) + f(b);
  for (std::size_t k = 1; k < n; ++k)
    acc += f(a + h * double(k)) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

SphericalOracle::SphericalOracle(SphericalOracleProblem p)
    : prob_(std::move(p)) {
  if (!(prob_.quad_step > 0.0))
    throw DomainError("oracle quadrature step must be positive");
  exp_g_.push_back(prob_.f2 ? -prob_.f2(0.0) : 0.0);
  integral_.push_back(0.0);
}

double SphericalOracle::g_of(double l) const {
  double inner = 0.0;
  if (prob_.f1) {
    double lo = std::max(1.0, prob_.f1_r_lo);
    double hi = std::min(l + 1.0, prob_.f1_r_hi);
    lo = std::max(lo, l + 1.0 - prob_.f1_t_hi);
    if (hi > lo)
      inner = simpson([&](double s) { return s * prob_.f1(l + 1.0 - s, s); },
                      lo, hi, prob_.quad_step);
  }
  return inner - (prob_.f2 ? prob_.f2(l) : 0.0);
}

void SphericalOracle::extend_table(double p_max) const {
  const double h = prob_.quad_step;
  const auto need = static_cast<std::size_t>(std::ceil(p_max / h)) + 2;
  while (exp_g_.size() < need) {
    const std::size_t k = exp_g_.size();
    const double l = h * double(k);
    exp_g_.push_back(std::exp(l) * g_of(l));
    // Cumulative integral: Simpson over even pairs, a one-sided cubic-order
    // rule (-1, 8, 5)/12 for the odd endpoints.
    const std::size_t m = integral_.size();
    if (m == 1) {
      integral_.push_back(integral_[0] + h * 0.5 * (exp_g_[0] + exp_g_[1]));
    } else if (m % 2 == 0) {
      integral_.push_back(integral_[m - 2] +
                          h / 3.0 * (exp_g_[m - 2] + 4.0 * exp_g_[m - 1] +
                                     exp_g_[m]));
    } else {
      integral_.push_back(integral_[m - 1] +
                          h / 12.0 * (-exp_g_[m - 2] + 8.0 * exp_g_[m - 1] +
                                      5.0 * exp_g_[m]));
    }
  }
}

double SphericalOracle::v0(double p) const {
  if (p <= 0.0) return 0.0;
  extend_table(p);
  const double h = prob_.quad_step;
  const double x = p / h;
  const auto k = std::min(static_cast<std::size_t>(x), integral_.size() - 2);
  const double frac = x - double(k);
  const double ival =
      integral_[k] * (1.0 - frac) + integral_[k + 1] * frac;
  return std::exp(-p) * ival;
}

double SphericalOracle::operator()(double t, double r) const {
  if (r < 1.0 - 1e-12) throw DomainError("oracle evaluated inside r < 1");
  if (t <= 0.0) return 0.0;
  const double p = t - r + 1.0;
  double value = p > 0.0 ? v0(p) / r : 0.0;
  if (prob_.f1 && r > 1.0) {
    const double xi = t - r;
    auto kernel = [&](double rp) {
      double lo = std::max(rp, prob_.f1_r_lo);
      double hi = std::min(xi + 2.0 * rp, prob_.f1_r_hi);
      lo = std::max(lo, xi + 2.0 * rp - prob_.f1_t_hi);
      if (!(hi > lo)) return 0.0;
      return simpson(
          [&](double s) { return s * prob_.f1(xi + 2.0 * rp - s, s); }, lo, hi,
          prob_.quad_step);
    };
    value += simpson(kernel, 1.0, r, prob_.quad_step) / r;
  }
  return value;
}

SphericalOracle::Residuals SphericalOracle::validate(double t0, double t1,
                                                     double r0, double r1,
                                                     double h, int nt,
                                                     int nr) const {
  Residuals res;
  const auto& self = *this;
  r0 = std::max(r0, 1.0 + h);
  for (int i = 0; i < nt; ++i) {
    const double t = t0 + (t1 - t0) * (nt > 1 ? double(i) / (nt - 1) : 0.5);
    for (int j = 0; j < nr; ++j) {
      const double r =
          r0 + (r1 - r0) * (nr > 1 ? double(j) / (nr - 1) : 0.5);
      const double vtt =
          (self(t + h, r) - 2.0 * self(t, r) + self(t - h, r)) / (h * h);
      const double vrr =
          (self(t, r + h) - 2.0 * self(t, r) + self(t, r - h)) / (h * h);
      const double vr = (self(t, r + h) - self(t, r - h)) / (2.0 * h);
      const double f = prob_.f1 ? prob_.f1(t, r) : 0.0;
      res.pde = std::max(res.pde,
                         std::abs(vtt - vrr - (2.0 / r) * vr - f));
    }
    const double dvr = (-3.0 * self(t, 1.0) + 4.0 * self(t, 1.0 + h) -
                        self(t, 1.0 + 2.0 * h)) /
                       (2.0 * h);
    const double f2 = prob_.f2 ? prob_.f2(t) : 0.0;
    res.bc = std::max(res.bc, std::abs(dvr - f2));
  }
  return res;
}

}  // namespace nullwave
