#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace semispec {

using Complex = std::complex<double>;

/// Fourier coefficients keyed by integer frequency, V(x) = sum_b w_b exp(2 pi i b x).
using CoeffMap = std::map<int, Complex>;

/// Real 1-periodic potential stored as a finite Fourier series.
///
/// Construction enforces w_{-b} = conj(w_b) by averaging each pair; a pair
/// that disagrees by more than 1e-12 (relative) is rejected as corrupt data.
/// Entries with |w_b| < truncation_tol are dropped.
class Potential {
 public:
  Potential() = default;
  Potential(std::string name, const CoeffMap& coeffs, double truncation_tol = 0.0);

  const std::string& name() const { return name_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  double truncation_tol() const { return truncation_tol_; }

  /// w_b, zero when b is not stored.
  Complex coefficient(int beta) const;

  /// Largest |b| with a stored coefficient (0 for a constant or empty map).
  int bandwidth() const;

  /// sum_b 2 pi |b| |w_b|, a bound on |V'|.
  double derivative_bound() const;

  /// Order-th derivative of V at x. Throws DataCorruption if the imaginary
  /// residue exceeds 1e-10 relative to the size of the summed terms.
  double eval(double x, int order = 0) const;

 private:
  struct Term {
    int beta;
    Complex w;
  };

  std::string name_;
  CoeffMap coeffs_;
  std::vector<Term> terms_;
  double truncation_tol_ = 0.0;
};

/// Well (Taylor) data at the global minimum. a[j] = V^{(j+2)}(x0) / (j+2)!.
struct WellData {
  double x0 = 0.0;
  double v_min = 0.0;
  std::array<double, 4> a{};
  bool degenerate = false;
};

inline double eval(const Potential& pot, double x, int order = 0) { return pot.eval(x, order); }

/// The four test potentials: "v1", "v2", "v3", "v4".
Potential builtin(std::string_view name);
bool is_builtin(std::string_view name);

/// Pointwise V_4(x) = exp(-1/sin^2(2 pi x)), with V_4 = 0 where the sine vanishes.
double v4_closed_form(double x);

/// Fourier coefficients of a smooth 1-periodic function. The sampling grid
/// starts at 64 nodes and doubles until every coefficient in the upper half
/// of the resolved band is below tol; coefficients below tol are dropped.
/// Throws TruncationFailure past 2^20 nodes.
CoeffMap fourier_coefficients(const std::function<double(double)>& f, double tol);

struct MinimumOptions {
  int scan_points = 4096;
  double root_tol = 1e-13;
  double degenerate_threshold = 1e-8;
};

/// Grid scan for the global minimizer, refined by safeguarded Newton on V'
/// with a golden-section fallback.
WellData locate_minimum(const Potential& pot, const MinimumOptions& opts = {});

/// Parses the potential definition format:
///
///     # comment
///     name = my_potential
///     truncation_tol = 1e-14
///     0 = [1.0, 0.0]
///     1 = [0.5, 0.0]
///
/// A frequency listed without its negative partner gets the conjugate.
Potential parse_potential(std::string_view text, const std::string& default_name = "custom");

/// Builtin name or path to a potential definition file.
Potential load_potential(const std::string& spec);

}  // namespace semispec
