#pragma once

#include <compare>
#include <numbers>
#include <vector>

#include "semispec/eig.hpp"
#include "semispec/potential.hpp"
#include "semispec/spectra.hpp"

namespace semispec {

/// h = p/q in lowest terms.
struct ReducedRational {
  long p = 1;
  long q = 1;

  double value() const { return static_cast<double>(p) / static_cast<double>(q); }

  /// Reduces p/q, warning when the input was not in lowest terms. Requires
  /// p > 0 and q > 0.
  static ReducedRational make(long p, long q);

  /// Best rational approximation with denominator <= max_den; throws unless
  /// it reproduces h to within tol.
  static ReducedRational approximate(double h, long max_den = 4096, double tol = 1e-12);

  friend auto operator<=>(const ReducedRational&, const ReducedRational&) = default;
};

/// Bloch-Floquet fiber M_theta of the discrete operator at h = p/q.
struct FloquetMatrix {
  int dim = 0;
  ComplexMatrix entries;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

enum class SpectrumMode { Pd, Sigma };

/// Theta sampling. n1/n2 count points per period 2 pi / q of theta1/theta2;
/// coarse1/coarse2 seed the minimum search before golden-section refinement.
struct FloquetGrids {
  int n1 = 64;
  int n2 = 32;
  int coarse1 = 16;
  int coarse2 = 16;
  double min_tol = 1e-8;
};

/// M = 2I - e^{-i theta1} K^* - e^{i theta1} K + diag(V((j-1) p/q + theta2 / 2pi)),
/// with K the cyclic shift. The lower triangle mirrors the upper exactly.
FloquetMatrix build_m(const Potential& pot, ReducedRational h, double theta1, double theta2);

std::vector<double> eig_hermitian(const FloquetMatrix& m);

/// Lowest eigenvalue of M_theta.
double lowest_floquet_eigenvalue(const Potential& pot, ReducedRational h, double theta1, double theta2);

/// Period of the spectrum in theta1 and in theta2.
inline double theta_period(ReducedRational h) { return 2.0 * std::numbers::pi / static_cast<double>(h.q); }

/// Spec(P_d(h, theta2)) sampled on theta1 in {k T / n1}, T = 2 pi / q.
SpectrumSample spec_pd(const Potential& pot, ReducedRational h, double theta2 = 0.0, int n1 = 64);

/// Sigma_h sampled on the (theta1, theta2) product grid over one period each.
SpectrumSample sigma_h(const Potential& pot, ReducedRational h, int n1 = 64, int n2 = 32);

/// Bound on |d lambda / d theta1| (hopping norm).
inline double lipschitz_theta1() { return 2.0; }

/// Bound on |d lambda / d theta2|: sum_b 2 pi |b| |w_b|.
double lipschitz_theta2(const Potential& pot);

/// L1 * dtheta1 + L2 * dtheta2 for the sampling grid (the theta2 term only
/// in sigma mode).
double grid_error_bound(const Potential& pot, ReducedRational h, SpectrumMode mode, int n1, int n2);

/// Default merge tolerance for rendering sampled bands: twice the grid bound.
double default_gap_tol(const Potential& pot, ReducedRational h, SpectrumMode mode, int n1, int n2);

struct MinimumResult {
  double value = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  int evaluations = 0;
};

/// Minimum of the lowest eigenvalue over theta1 (pd, theta2 = 0) or over the
/// torus (sigma): coarse grid, then golden-section per coordinate until the
/// eigenvalue changes by less than tol.
MinimumResult min_spec_detailed(const Potential& pot, ReducedRational h, SpectrumMode mode, double tol,
                                const FloquetGrids& grids = {});

double min_spec(const Potential& pot, ReducedRational h, SpectrumMode mode, double tol = 1e-8,
                const FloquetGrids& grids = {});

/// [min, max] of each eigenvalue branch over theta, refined like min_spec.
std::vector<Interval> band_ranges(const Potential& pot, ReducedRational h, SpectrumMode mode,
                                  const FloquetGrids& grids = {});

/// Union of band_ranges; bands closer than join_tol are joined.
IntervalUnion band_union(const Potential& pot, ReducedRational h, SpectrumMode mode, const FloquetGrids& grids = {},
                         double join_tol = 1e-7);

struct ButterflySlice {
  ReducedRational h;
  SpectrumMode mode = SpectrumMode::Pd;
  SpectrumSample sample;
  IntervalUnion bands;
};

/// One slice per (h, mode) in the order given, computed on `workers` threads.
std::vector<ButterflySlice> butterfly(const Potential& pot, const std::vector<ReducedRational>& hs,
                                      const std::vector<SpectrumMode>& modes, const FloquetGrids& grids,
                                      unsigned workers = 1);

/// Reduced p/q in (0, 1] with q <= q_max, ordered by (q, p). P_d(h) is
/// 1-periodic in h, so this covers every rational.
std::vector<ReducedRational> farey_sweep(long q_max);

/// h = p / den for p = 1..den, reduced, in order of p.
std::vector<ReducedRational> fixed_denominator_sweep(long den);

}  // namespace semispec
