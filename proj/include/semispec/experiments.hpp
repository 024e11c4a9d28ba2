#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semispec/bohr_sommerfeld.hpp"
#include "semispec/floquet.hpp"
#include "semispec/hill.hpp"
#include "semispec/potential.hpp"
#include "semispec/table.hpp"

namespace semispec {

struct Tolerances {
  double min_tol = 1e-8;   // theta refinement of Floquet minima
  double hill_tol = 1e-12; // Galerkin doubling
};

/// One row of the d(h) / D(h) study. A failed sub-computation leaves NaN in
/// the affected columns and its message in `error`.
struct ComparisonRecord {
  long p = 0;
  long q = 0;
  double h = 0.0;
  double min_pd = 0.0;
  double min_sigma = 0.0;
  double min_pc = 0.0;
  double d = 0.0;
  double D = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Drops repeated h (after reduction), keeping first occurrences in order.
std::vector<ReducedRational> dedupe(const std::vector<ReducedRational>& hs);

std::vector<ComparisonRecord> compare(const Potential& pot, const std::vector<ReducedRational>& hs,
                                      const Tolerances& tols = {}, const FloquetGrids& grids = {},
                                      unsigned workers = 1);

/// compare.csv: p, q, h, min_pd, min_sigma, min_pc, d, D, status.
Table comparison_table(const std::vector<ComparisonRecord>& records);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

/// Least squares of log y on log x.
FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys);

/// FNV-1a over the "%.17g" renderings of the fit inputs.
std::string inputs_digest(const std::vector<double>& xs, const std::vector<double>& ys);

/// n points geometrically spaced on [lo, hi], endpoints included.
std::vector<double> geometric_grid(double lo, double hi, int n);

struct ScalingResult {
  FitResult fit;
  std::vector<double> hs;
  std::vector<HillResult> minima;
};

/// Slope of log min_spec_pc(h) against log h.
ScalingResult scaling_exponent(const Potential& pot, Kinetic kinetic, const std::vector<double>& hs,
                               double hill_tol = 1e-12, unsigned workers = 1);

struct BSComparison {
  double h = 0.0;
  double e_spec = 0.0;
  double e_bs = 0.0;
  double diff = 0.0;
};

/// E_spec - v_min against the two-term ground state. Continuous kinetic uses
/// the Galerkin solver; discrete uses min Spec(P_d(h)) at the rational h.
std::vector<BSComparison> bs_vs_spec(const Potential& pot, Kinetic kinetic, const std::vector<double>& hs,
                                     const Tolerances& tols = {}, const FloquetGrids& grids = {},
                                     unsigned workers = 1);

struct HoelderReport {
  long q = 0;
  std::vector<long> ps;
  std::vector<double> ratios;  // r(p) = d_H(Sigma_{p/q}, Sigma_{(p+1)/q}) q^{1/2}
  double max = 0.0;
  double median = 0.0;
  bool flagged = false;        // max > 10 median
};

/// Hausdorff distances between merged hull samples at consecutive p/q,
/// scaled by (1/q)^{1/2}.
HoelderReport hoelder_check(const Potential& pot, long q, const FloquetGrids& grids = {}, unsigned workers = 1);

struct DiscontinuityReport {
  std::string potential;
  ReducedRational h;
  double min_pd = 0.0;
  double min_sigma = 0.0;
  double expected_pd = 0.0;
  double expected_sigma = 0.0;
  IntervalUnion pd_bands;
  IntervalUnion sigma_bands;
  std::vector<Interval> expected_pd_bands;
  std::vector<Interval> expected_sigma_bands;
  double max_error = 0.0;
  bool pass = false;
};

/// Closed-form band checks at h = 1/2 and h = 1 for V_1 and V_2; any other
/// pair throws NotAnOracle.
DiscontinuityReport discontinuity_report(const Potential& pot, ReducedRational h, const FloquetGrids& grids = {},
                                         double tol = 1e-6);

/// Which builtin (if any) has exactly these coefficients.
std::optional<std::string> identify_builtin(const Potential& pot);

/// bs.csv: potential, kinetic, a0, a1, a2, a3, alpha1, alpha2, h, E0, d_leading.
/// With no h values a single row leaves the last three cells empty.
Table bs_table(const std::string& name, const BSModel& model, const std::vector<double>& hs = {});

/// potential, kinetic, h, N_final, min_eig.
Table hill_table(const std::string& name, Kinetic kinetic, const std::vector<double>& hs,
                 const std::vector<HillResult>& minima);

/// h, E_spec, E_bs, abs_diff.
Table bs_comparison_table(const std::vector<BSComparison>& rows);

/// p, q, r.
Table hoelder_table(const HoelderReport& report);

}  // namespace semispec
