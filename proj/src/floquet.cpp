#include "semispec/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>

#include "semispec/error.hpp"
#include "semispec/log.hpp"
#include "semispec/parallel.hpp"

namespace semispec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxRounds = 20;

struct Argmin {
  double x = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

// Golden-section search on [a, b], stopped once lipschitz * (b - a) < tol.
Argmin golden(const std::function<double(double)>& f, double a, double b, double lipschitz, double tol, int& evals) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  evals += 2;
  Argmin best = fc < fd ? Argmin{c, fc} : Argmin{d, fd};
  for (int iter = 0; iter < 200 && lipschitz * (b - a) >= tol; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
      if (fc < best.value) best = {c, fc};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
      if (fd < best.value) best = {d, fd};
    }
    ++evals;
  }
  return best;
}

std::string where(ReducedRational h, double t1, double t2) {
  return "(p=" + std::to_string(h.p) + ", q=" + std::to_string(h.q) + ", theta1=" + std::to_string(t1) +
         ", theta2=" + std::to_string(t2) + ")";
}

// Minimizes sign * lambda_band(theta) over theta1 (and theta2 in sigma mode),
// starting from the best point on the given grid.
MinimumResult refine_branch(const Potential& pot, ReducedRational h, SpectrumMode mode, int band, double sign,
                            int c1, int c2, double tol) {
  const double period = theta_period(h);
  auto branch = [&](double t1, double t2) {
    const auto ev = eig_hermitian(build_m(pot, h, t1, t2));
    return sign * ev[static_cast<std::size_t>(band)];
  };
  const bool sigma = mode == SpectrumMode::Sigma;
  const int n2 = sigma ? c2 : 1;
  MinimumResult res;
  res.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < c1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const double t1 = i * period / c1, t2 = sigma ? j * period / c2 : 0.0;
      const double v = branch(t1, t2);
      ++res.evaluations;
      if (v < res.value) res = {v, t1, t2, res.evaluations};
    }
  }
  const double l1 = lipschitz_theta1(), l2 = lipschitz_theta2(pot);
  const double w1 = period / c1, w2 = period / c2;
  for (int round = 0; round < kMaxRounds; ++round) {
    const double before = res.value;
    const double t2 = res.theta2;
    const Argmin a1 = golden([&](double t) { return branch(t, t2); }, res.theta1 - w1, res.theta1 + w1, l1, tol,
                             res.evaluations);
    if (a1.value < res.value) {
      res.value = a1.value;
      res.theta1 = a1.x;
    }
    if (!sigma) break;
    if (l2 > 0.0) {
      const double t1 = res.theta1;
      const Argmin a2 = golden([&](double t) { return branch(t1, t); }, res.theta2 - w2, res.theta2 + w2, l2, tol,
                               res.evaluations);
      if (a2.value < res.value) {
        res.value = a2.value;
        res.theta2 = a2.x;
      }
    }
    if (before - res.value < tol) break;
  }
  res.value *= sign;
  return res;
}

}  // namespace

ReducedRational ReducedRational::make(long p, long q) {
  require(q > 0, "h = p/q requires q > 0 (got q=" + std::to_string(q) + ")");
  require(p > 0, "h = p/q requires p > 0 (got p=" + std::to_string(p) + ")");
  const long g = std::gcd(p, q);
  if (g != 1) warn(std::to_string(p) + "/" + std::to_string(q) + " reduced to " + std::to_string(p / g) + "/" +
                   std::to_string(q / g));
  return {p / g, q / g};
}

ReducedRational ReducedRational::approximate(double h, long max_den, double tol) {
  require(h > 0.0 && std::isfinite(h), "h must be positive and finite");
  for (long q = 1; q <= max_den; ++q) {
    const long p = std::lround(h * static_cast<double>(q));
    if (p > 0 && std::abs(static_cast<double>(p) / static_cast<double>(q) - h) <= tol) {
      const long g = std::gcd(p, q);
      return {p / g, q / g};
    }
  }
  fail(ErrorKind::InvalidArgument, "h=" + std::to_string(h) + " has no rational form with denominator <= " +
                                       std::to_string(max_den));
}

FloquetMatrix build_m(const Potential& pot, ReducedRational h, double theta1, double theta2) {
  require(h.q >= 1 && h.p >= 1, "build_m: h must be a positive rational");
  const int q = static_cast<int>(h.q);
  FloquetMatrix m;
  m.dim = q;
  m.theta1 = theta1;
  m.theta2 = theta2;
  m.entries = ComplexMatrix::Zero(q, q);
  const Complex hop = std::polar(1.0, theta1);
  for (int i = 0; i < q; ++i) {
    const int j = (i + 1) % q;
    m.entries(i, j) -= hop;
    m.entries(j, i) -= std::conj(hop);
  }
  const double shift = theta2 / kTwoPi;
  for (int j = 0; j < q; ++j) {
    // (j p mod q)/q equals j p/q modulo 1 and keeps the argument in [0, 1).
    const long r = (static_cast<long>(j) * h.p) % h.q;
    const double x = static_cast<double>(r) / static_cast<double>(h.q) + shift;
    m.entries(j, j) = Complex(2.0 + m.entries(j, j).real() + pot.eval(x), 0.0);
  }
  for (int r = 0; r < q; ++r)
    for (int c = r + 1; c < q; ++c) m.entries(c, r) = std::conj(m.entries(r, c));
  return m;
}

std::vector<double> eig_hermitian(const FloquetMatrix& m) { return eig_hermitian(m.entries); }

double lowest_floquet_eigenvalue(const Potential& pot, ReducedRational h, double theta1, double theta2) {
  return eig_hermitian(build_m(pot, h, theta1, theta2)).front();
}

SpectrumSample spec_pd(const Potential& pot, ReducedRational h, double theta2, int n1) {
  require(n1 >= 2, "spec_pd: n1 must be >= 2");
  const double period = theta_period(h);
  std::vector<SampleRow> rows;
  rows.reserve(static_cast<std::size_t>(n1) * h.q);
  for (int i = 0; i < n1; ++i) {
    const double t1 = i * period / n1;
    std::vector<double> ev;
    try {
      ev = eig_hermitian(build_m(pot, h, t1, theta2));
    } catch (const Error& e) {
      fail(e.kind(), std::string(e.what()) + " at " + where(h, t1, theta2));
    }
    for (std::size_t k = 0; k < ev.size(); ++k) rows.push_back({t1, theta2, static_cast<int>(k), ev[k]});
  }
  return SpectrumSample(std::move(rows), {h.p, h.q, n1, 0, 1e-13});
}

SpectrumSample sigma_h(const Potential& pot, ReducedRational h, int n1, int n2) {
  require(n1 >= 2 && n2 >= 2, "sigma_h: n1 and n2 must be >= 2");
  const double period = theta_period(h);
  std::vector<SampleRow> rows;
  rows.reserve(static_cast<std::size_t>(n1) * n2 * h.q);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const double t1 = i * period / n1, t2 = j * period / n2;
      std::vector<double> ev;
      try {
        ev = eig_hermitian(build_m(pot, h, t1, t2));
      } catch (const Error& e) {
        fail(e.kind(), std::string(e.what()) + " at " + where(h, t1, t2));
      }
      for (std::size_t k = 0; k < ev.size(); ++k) rows.push_back({t1, t2, static_cast<int>(k), ev[k]});
    }
  }
  return SpectrumSample(std::move(rows), {h.p, h.q, n1, n2, 1e-13});
}

double lipschitz_theta2(const Potential& pot) { return pot.derivative_bound(); }

double grid_error_bound(const Potential& pot, ReducedRational h, SpectrumMode mode, int n1, int n2) {
  const double period = theta_period(h);
  double bound = lipschitz_theta1() * period / n1;
  if (mode == SpectrumMode::Sigma) bound += lipschitz_theta2(pot) * period / n2;
  return bound;
}

double default_gap_tol(const Potential& pot, ReducedRational h, SpectrumMode mode, int n1, int n2) {
  return 2.0 * grid_error_bound(pot, h, mode, n1, n2);
}

MinimumResult min_spec_detailed(const Potential& pot, ReducedRational h, SpectrumMode mode, double tol,
                                const FloquetGrids& grids) {
  require(tol > 0.0, "min_spec: tol must be positive");
  require(grids.coarse1 >= 2 && grids.coarse2 >= 2, "min_spec: coarse grids must have >= 2 points");
  return refine_branch(pot, h, mode, 0, 1.0, grids.coarse1, grids.coarse2, tol);
}

double min_spec(const Potential& pot, ReducedRational h, SpectrumMode mode, double tol, const FloquetGrids& grids) {
  return min_spec_detailed(pot, h, mode, tol, grids).value;
}

std::vector<Interval> band_ranges(const Potential& pot, ReducedRational h, SpectrumMode mode,
                                  const FloquetGrids& grids) {
  std::vector<Interval> bands;
  bands.reserve(static_cast<std::size_t>(h.q));
  for (int k = 0; k < h.q; ++k) {
    const auto lo = refine_branch(pot, h, mode, k, 1.0, grids.coarse1, grids.coarse2, grids.min_tol);
    const auto hi = refine_branch(pot, h, mode, k, -1.0, grids.coarse1, grids.coarse2, grids.min_tol);
    bands.push_back({lo.value, hi.value});
  }
  return bands;
}

IntervalUnion band_union(const Potential& pot, ReducedRational h, SpectrumMode mode, const FloquetGrids& grids,
                         double join_tol) {
  return merge_intervals(band_ranges(pot, h, mode, grids), join_tol);
}

std::vector<ButterflySlice> butterfly(const Potential& pot, const std::vector<ReducedRational>& hs,
                                      const std::vector<SpectrumMode>& modes, const FloquetGrids& grids,
                                      unsigned workers) {
  require(!modes.empty(), "butterfly: no spectrum mode selected");
  std::vector<ButterflySlice> slices(hs.size() * modes.size());
  parallel_for(slices.size(), workers, [&](std::size_t idx) {
    const ReducedRational h = hs[idx / modes.size()];
    const SpectrumMode mode = modes[idx % modes.size()];
    ButterflySlice s;
    s.h = h;
    s.mode = mode;
    s.sample = mode == SpectrumMode::Pd ? spec_pd(pot, h, 0.0, grids.n1) : sigma_h(pot, h, grids.n1, grids.n2);
    s.bands = merge(s.sample, default_gap_tol(pot, h, mode, grids.n1, grids.n2));
    slices[idx] = std::move(s);
  });
  return slices;
}

std::vector<ReducedRational> farey_sweep(long q_max) {
  require(q_max >= 1, "farey_sweep: q_max must be >= 1");
  std::vector<ReducedRational> out;
  for (long q = 1; q <= q_max; ++q)
    for (long p = 1; p <= q; ++p)
      if (std::gcd(p, q) == 1) out.push_back({p, q});
  return out;
}

std::vector<ReducedRational> fixed_denominator_sweep(long den) {
  require(den >= 1, "fixed_denominator_sweep: denominator must be >= 1");
  std::vector<ReducedRational> out;
  for (long p = 1; p <= den; ++p) {
    const long g = std::gcd(p, den);
    out.push_back({p / g, den / g});
  }
  return out;
}

}  // namespace semispec
