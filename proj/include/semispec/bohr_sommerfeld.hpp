#pragma once

#include <array>
#include <vector>

#include "semispec/hill.hpp"
#include "semispec/potential.hpp"
#include "semispec/series.hpp"

namespace semispec {

/// Well Taylor data, V(t) = a0 t^2 + a1 t^3 + a2 t^4 + a3 t^5 + ..., with
/// a0 > 0. Higher coefficients are taken as zero.
struct TaylorWell {
  double a0 = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  /// Throws DegenerateWell for a degenerate minimum (the quantization rule
  /// may not apply there).
  static TaylorWell from(const WellData& well);

  /// The same well seen from the other side, t -> -t.
  TaylorWell reflected() const { return {a0, -a1, a2, -a3}; }

  /// V as a series in x truncated at degree 5.
  PowerSeries as_series() const;
};

struct Alphas {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

struct BSModel {
  TaylorWell well;
  Kinetic kinetic = Kinetic::Continuous;
  std::array<double, 4> beta{};
  std::array<double, 4> b{};
  std::array<double, 4> c{};
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

/// beta_1..beta_K of the positive branch x(y) with V(x(y)) = y^2 + O(y^{K+2}),
/// by order-by-order elimination: beta_{m+1} = -[y^{m+2}] V(x_m(y)) / (2 a0 beta_1).
std::vector<double> invert_series(const TaylorWell& well, int order);

/// Closed-form beta_1..beta_4.
std::array<double, 4> beta_closed_form(const TaylorWell& well);

/// Taylor coefficients of 2y / V'(V^{-1}(y^2)) and of V''(V^{-1}(y^2)),
/// computed by series composition and division.
std::array<double, 4> b_coeffs_series(const TaylorWell& well);
std::array<double, 4> c_coeffs_series(const TaylorWell& well);

/// The same coefficients from their closed forms.
std::array<double, 4> b_coeffs(const TaylorWell& well);
std::array<double, 4> c_coeffs(const TaylorWell& well);

/// Action coefficients from b and c:
///   alpha1 = b2 / 4,  alpha2 = -(b0 c2 + b1 c1 + b2 c0) / 24,
/// plus b0/32 and (3/8) b0 c0 / 24 for the discrete symbol.
Alphas alphas(const TaylorWell& well, Kinetic kinetic);

/// Closed-form action coefficients in terms of a0, a1, a2 alone.
Alphas alphas_closed_form(const TaylorWell& well, Kinetic kinetic);

BSModel make_model(const TaylorWell& well, Kinetic kinetic);

/// S_0(E) = e_coeff E + e2_coeff E^2 + O(E^3).
struct S0Series {
  double e_coeff = 0.0;
  double e2_coeff = 0.0;
};

S0Series s0_series(const TaylorWell& well, Kinetic kinetic);

/// S_2(E) = s2_const + O(E).
double s2_const(const TaylorWell& well, Kinetic kinetic);

/// Two-term Bohr-Sommerfeld level n: solves 2 pi (n + 1/2) h = S_0(E) + h^2 S_2(E)
/// to second order in h.
double bs_level(const TaylorWell& well, Kinetic kinetic, double h, int n);

/// Ground state, E_0(h) = a0^{1/2} h - a0^{1/2} (a0 alpha1 + alpha2) h^2.
double e0(const TaylorWell& well, Kinetic kinetic, double h);

/// Leading behaviour of the discrete/continuous ratio, 1 - sqrt(a0) h / 16.
double d_leading(double a0, double h);

}  // namespace semispec
