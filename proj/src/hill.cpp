#include "semispec/hill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "semispec/error.hpp"

namespace semispec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxModes = 1 << 12;

bool all_real(const Potential& pot) {
  return std::all_of(pot.coeffs().begin(), pot.coeffs().end(), [](const auto& kv) { return kv.second.imag() == 0.0; });
}

// Size of the matrix entries, used for the round-off floor of the eigenvalue.
double matrix_scale(const HillProblem& prob) {
  double coeff_sum = 0.0;
  for (const auto& [beta, w] : prob.pot.coeffs()) coeff_sum += std::abs(w);
  double t_max = 0.0;
  for (int n : {-prob.n_modes, prob.n_modes})
    t_max = std::max(t_max, kinetic_symbol(prob.kinetic, prob.h * (kTwoPi * n + prob.bloch_phase)));
  return t_max + coeff_sum;
}

}  // namespace

double kinetic_symbol(Kinetic kinetic, double xi) {
  return kinetic == Kinetic::Continuous ? xi * xi : 2.0 * (1.0 - std::cos(xi));
}

const char* to_string(Kinetic kinetic) { return kinetic == Kinetic::Continuous ? "continuous" : "discrete"; }

namespace {

ComplexMatrix assemble_clipped(const HillProblem& prob) {
  require(prob.h > 0.0, "Hill problem: h must be positive");
  require(prob.n_modes >= 1, "Hill problem: n_modes must be >= 1");
  const int n = prob.n_modes;
  const int dim = 2 * n + 1;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const int mode = i - n;
    m(i, i) = kinetic_symbol(prob.kinetic, prob.h * (kTwoPi * mode + prob.bloch_phase));
  }
  for (const auto& [beta, w] : prob.pot.coeffs()) {
    for (int i = std::max(0, beta); i < std::min(dim, dim + beta); ++i) m(i, i - beta) += w;
  }
  return m;
}

double lowest_of(const Potential& pot, const ComplexMatrix& m) {
  if (all_real(pot)) return lowest_eigenvalue(RealMatrix(m.real()));
  return lowest_eigenvalue(m);
}

}  // namespace

ComplexMatrix assemble(const HillProblem& prob) {
  if (prob.n_modes < prob.pot.bandwidth())
    fail(ErrorKind::InvalidArgument, "Hill problem: n_modes=" + std::to_string(prob.n_modes) +
                                         " is below the potential bandwidth " +
                                         std::to_string(prob.pot.bandwidth()));
  return assemble_clipped(prob);
}

double hill_lowest(const HillProblem& prob) { return lowest_of(prob.pot, assemble(prob)); }

int kinetic_period_modes(double h) {
  require(h > 0.0, "kinetic_period_modes: h must be positive");
  return static_cast<int>(std::floor(0.5 / h + 1e-9));
}

HillResult min_spec_pc(const Potential& pot, double h, Kinetic kinetic, double tol) {
  require(h > 0.0 && h <= 2.0, "min_spec_pc: h must lie in (0, 2]");
  require(tol > 0.0, "min_spec_pc: tol must be positive");
  const bool discrete = kinetic == Kinetic::Discrete;
  // The discrete symbol is 1/h-periodic in the mode index; the basis stops at
  // one period.
  const int cap = discrete ? kinetic_period_modes(h) : kMaxModes;
  if (discrete && cap < 1)
    fail(ErrorKind::InvalidArgument, "min_spec_pc: the discrete symbol needs h <= 1/2 (got h=" + std::to_string(h) + ")");
  HillProblem prob{pot, h, kinetic, std::min(std::max(16, pot.bandwidth()), cap), 0.0};
  auto lowest = [&] { return lowest_of(pot, discrete ? assemble_clipped(prob) : assemble(prob)); };
  double prev = lowest();
  while (true) {
    if (prob.n_modes == cap) {
      if (discrete) return {prev, prob.n_modes};
      fail(ErrorKind::NonConvergence, "min_spec_pc: no convergence at N=" + std::to_string(kMaxModes) + " (h=" +
                                          std::to_string(h) + ", potential " + pot.name() + ")");
    }
    prob.n_modes = std::min(2 * prob.n_modes, cap);
    const double cur = lowest();
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * matrix_scale(prob);
    if (std::abs(cur - prev) < std::max(tol, floor)) return {cur, prob.n_modes};
    prev = cur;
  }
}

std::vector<std::pair<double, double>> bloch_sweep(const Potential& pot, double h, Kinetic kinetic, int n_k,
                                                   int n_modes) {
  require(n_k >= 2, "bloch_sweep: n_k must be >= 2");
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(n_k));
  for (int j = 0; j < n_k; ++j) {
    const double kappa = kTwoPi * j / n_k;
    out.emplace_back(kappa, hill_lowest({pot, h, kinetic, n_modes, kappa}));
  }
  return out;
}

double bloch_excess(const std::vector<std::pair<double, double>>& sweep) {
  require(!sweep.empty(), "bloch_excess: empty sweep");
  double at_zero = std::numeric_limits<double>::quiet_NaN();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [kappa, e] : sweep) {
    if (kappa == 0.0) at_zero = e;
    best = std::min(best, e);
  }
  require(!std::isnan(at_zero), "bloch_excess: sweep does not contain kappa = 0");
  return at_zero - best;
}

}  // namespace semispec
