#include "semispec/bohr_sommerfeld.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "semispec/error.hpp"
#include "semispec/log.hpp"

namespace semispec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kWork = 6;

void check(const TaylorWell& w) {
  if (!(w.a0 > 0.0) || !std::isfinite(w.a0) || !std::isfinite(w.a1) || !std::isfinite(w.a2) || !std::isfinite(w.a3))
    fail(ErrorKind::DegenerateWell, "Bohr-Sommerfeld requires a0 > 0 (got a0=" + std::to_string(w.a0) +
                                        "); the quantization rule may not apply to a degenerate well");
}

// x(y) = sum beta_n y^n as a series of degree `degree`.
PowerSeries branch_series(const TaylorWell& well, int degree) {
  const auto beta = invert_series(well, degree);
  PowerSeries x(degree);
  for (int n = 1; n <= degree; ++n) x[n] = beta[static_cast<std::size_t>(n - 1)];
  return x;
}

std::array<double, 4> first_four(const PowerSeries& s) { return {s[0], s[1], s[2], s[3]}; }

}  // namespace

TaylorWell TaylorWell::from(const WellData& well) {
  if (well.degenerate)
    fail(ErrorKind::DegenerateWell, "degenerate well (a0=" + std::to_string(well.a[0]) +
                                        "): the quantization rule may not apply");
  TaylorWell t{well.a[0], well.a[1], well.a[2], well.a[3]};
  check(t);
  return t;
}

PowerSeries TaylorWell::as_series() const { return PowerSeries(5, {0.0, 0.0, a0, a1, a2, a3}); }

std::vector<double> invert_series(const TaylorWell& well, int order) {
  check(well);
  require(order >= 1 && order <= kWork, "invert_series: order must be in [1, 6]");
  const PowerSeries v = PowerSeries(kWork + 1, {0.0, 0.0, well.a0, well.a1, well.a2, well.a3});
  std::vector<double> beta{1.0 / std::sqrt(well.a0)};
  PowerSeries x(kWork + 1);
  x[1] = beta[0];
  for (int m = 1; m < order; ++m) {
    // V(x_m(y)) = y^2 + c_{m+2,m} y^{m+2} + ...; the y^{m+2} term of
    // a0 (x_m + beta_{m+1} y^{m+1})^2 is 2 a0 beta_1 beta_{m+1}.
    const double c = v.compose(x)[m + 2];
    const double next = -c / (2.0 * well.a0 * beta[0]);
    beta.push_back(next);
    x[m + 1] = next;
  }
  return beta;
}

std::array<double, 4> beta_closed_form(const TaylorWell& w) {
  check(w);
  const double a0 = w.a0, a1 = w.a1, a2 = w.a2, a3 = w.a3;
  return {std::pow(a0, -0.5), -0.5 * std::pow(a0, -2.0) * a1,
          0.625 * std::pow(a0, -3.5) * a1 * a1 - 0.5 * std::pow(a0, -2.5) * a2,
          -std::pow(a0, -5.0) * a1 * a1 * a1 + 1.5 * std::pow(a0, -4.0) * a1 * a2 - 0.5 * std::pow(a0, -3.0) * a3};
}

std::array<double, 4> b_coeffs_series(const TaylorWell& well) {
  check(well);
  constexpr int d = 4;
  const PowerSeries x = branch_series(well, d);
  const PowerSeries vprime = well.as_series().derivative();
  // 2y / V'(x(y)) = 2 / (V'(x(y)) / y).
  const PowerSeries b = vprime.compose(x).divide_by_y().reciprocal() * 2.0;
  return first_four(b);
}

std::array<double, 4> c_coeffs_series(const TaylorWell& well) {
  check(well);
  constexpr int d = 4;
  const PowerSeries x = branch_series(well, d);
  const PowerSeries vsecond = well.as_series().derivative().derivative();
  return first_four(vsecond.compose(x));
}

std::array<double, 4> b_coeffs(const TaylorWell& w) {
  check(w);
  const double a0 = w.a0, a1 = w.a1, a2 = w.a2, a3 = w.a3;
  return {std::pow(a0, -0.5), -std::pow(a0, -2.0) * a1,
          15.0 / 8.0 * std::pow(a0, -3.5) * a1 * a1 - 1.5 * std::pow(a0, -2.5) * a2,
          -4.0 * std::pow(a0, -5.0) * a1 * a1 * a1 + 6.0 * std::pow(a0, -4.0) * a1 * a2 - 2.0 * std::pow(a0, -3.0) * a3};
}

std::array<double, 4> c_coeffs(const TaylorWell& w) {
  check(w);
  const double a0 = w.a0, a1 = w.a1, a2 = w.a2, a3 = w.a3;
  return {2.0 * a0, 6.0 * std::pow(a0, -0.5) * a1, -3.0 * std::pow(a0, -2.0) * a1 * a1 + 12.0 / a0 * a2,
          30.0 / 8.0 * std::pow(a0, -3.5) * a1 * a1 * a1 - 15.0 * std::pow(a0, -2.5) * a1 * a2 +
              20.0 * std::pow(a0, -1.5) * a3};
}

Alphas alphas(const TaylorWell& well, Kinetic kinetic) {
  const auto b = b_coeffs_series(well);
  const auto c = c_coeffs_series(well);
  Alphas out{b[2] / 4.0, -(b[0] * c[2] + b[1] * c[1] + b[2] * c[0]) / 24.0};
  if (kinetic == Kinetic::Discrete) {
    // d xi = (1 + eta^2/8 + ...) d eta and A'' = 2 - eta^2.
    out.alpha1 += b[0] / 32.0;
    out.alpha2 += 3.0 / 8.0 * b[0] * c[0] / 24.0;
  }
  return out;
}

Alphas alphas_closed_form(const TaylorWell& w, Kinetic kinetic) {
  check(w);
  const double a0 = w.a0, a1 = w.a1, a2 = w.a2;
  Alphas out{0.25 * (15.0 / 8.0 * std::pow(a0, -3.5) * a1 * a1 - 1.5 * std::pow(a0, -2.5) * a2),
             (21.0 / 4.0 * std::pow(a0, -2.5) * a1 * a1 - 9.0 * std::pow(a0, -1.5) * a2) / 24.0};
  if (kinetic == Kinetic::Discrete) {
    out.alpha1 += std::pow(a0, -0.5) / 32.0;
    out.alpha2 += std::sqrt(a0) / 32.0;
  }
  return out;
}

BSModel make_model(const TaylorWell& well, Kinetic kinetic) {
  BSModel m;
  m.well = well;
  m.kinetic = kinetic;
  const auto beta = invert_series(well, 4);
  for (std::size_t i = 0; i < 4; ++i) m.beta[i] = beta[i];
  m.b = b_coeffs_series(well);
  m.c = c_coeffs_series(well);
  const Alphas a = alphas(well, kinetic);
  m.alpha1 = a.alpha1;
  m.alpha2 = a.alpha2;
  return m;
}

S0Series s0_series(const TaylorWell& well, Kinetic kinetic) {
  const Alphas a = alphas(well, kinetic);
  return {kPi / std::sqrt(well.a0), kPi * a.alpha1};
}

double s2_const(const TaylorWell& well, Kinetic kinetic) { return kPi * alphas(well, kinetic).alpha2; }

double bs_level(const TaylorWell& well, Kinetic kinetic, double h, int n) {
  require(h > 0.0, "Bohr-Sommerfeld level: h must be positive");
  require(n >= 0, "Bohr-Sommerfeld level: n must be >= 0");
  const Alphas a = alphas(well, kinetic);
  const double root = std::sqrt(well.a0);
  const double m = 2.0 * n + 1.0;
  if (root * m * h > 0.5)
    warn("Bohr-Sommerfeld expansion used outside its small-h regime (sqrt(a0) (2n+1) h = " +
         std::to_string(root * m * h) + ")");
  return root * m * h - root * (well.a0 * a.alpha1 * m * m + a.alpha2) * h * h;
}

double e0(const TaylorWell& well, Kinetic kinetic, double h) { return bs_level(well, kinetic, h, 0); }

double d_leading(double a0, double h) {
  require(a0 > 0.0, "d_leading: a0 must be positive");
  return 1.0 - std::sqrt(a0) * h / 16.0;
}

}  // namespace semispec
