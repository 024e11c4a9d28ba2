#pragma once

#include <utility>
#include <vector>

#include "semispec/eig.hpp"
#include "semispec/potential.hpp"

namespace semispec {

/// Kinetic symbol T(xi): xi^2 (continuous) or 2(1 - cos xi) (discrete model).
enum class Kinetic { Continuous, Discrete };

double kinetic_symbol(Kinetic kinetic, double xi);
const char* to_string(Kinetic kinetic);

/// -h^2 d^2/dx^2 + V (or 2(1 - cos(hD)) + V) on the unit cell, truncated to
/// the plane waves exp(i(2 pi n + kappa) x), |n| <= n_modes.
struct HillProblem {
  Potential pot;
  double h = 0.1;
  Kinetic kinetic = Kinetic::Continuous;
  int n_modes = 16;
  double bloch_phase = 0.0;
};

/// Galerkin matrix, entry (n, m) = delta_nm T(h(2 pi n + kappa)) + w_{n-m}.
ComplexMatrix assemble(const HillProblem& prob);

/// Lowest eigenvalue of assemble(prob); uses a real symmetric solve when
/// every Fourier coefficient is real.
double hill_lowest(const HillProblem& prob);

struct HillResult {
  double min_eig = 0.0;
  int n_final = 0;
};

/// Modes with |2 pi h n| <= pi, one period of the discrete symbol.
int kinetic_period_modes(double h);

/// Bottom of the spectrum at kappa = 0: n_modes doubles from
/// max(16, bandwidth) until successive minima differ by less than tol (or by
/// the round-off floor of the matrix). Throws NonConvergence past 2^12 modes.
///
/// For the discrete symbol the basis is capped at kinetic_period_modes(h)
/// (h <= 1/2 required) and potential couplings leaving that window are
/// dropped: beyond one period the symbol repeats, the truncated minimum only
/// creeps down to a band bottom lying O(exp(-c/h)) below the single-well
/// value.
HillResult min_spec_pc(const Potential& pot, double h, Kinetic kinetic, double tol = 1e-12);

/// Lowest eigenvalue per Bloch phase kappa_j = 2 pi j / n_k at fixed n_modes.
std::vector<std::pair<double, double>> bloch_sweep(const Potential& pot, double h, Kinetic kinetic, int n_k,
                                                   int n_modes);

/// Largest amount by which any swept kappa beats kappa = 0 (<= 0 when the
/// band minimum sits at kappa = 0).
double bloch_excess(const std::vector<std::pair<double, double>>& sweep);

}  // namespace semispec
