// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when a
// criterion fails, unless it was named with --allow-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "semispec/bohr_sommerfeld.hpp"
#include "semispec/experiments.hpp"
#include "semispec/floquet.hpp"
#include "semispec/hill.hpp"
#include "semispec/log.hpp"
#include "semispec/parallel.hpp"
#include "semispec/spectra.hpp"
#include "well_oracles.hpp"

using namespace semispec;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& note) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "[x] ") + note);
  }
  void note(const std::string& text) { notes.push_back(text); }
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

const double kS3 = std::sqrt(3.0);

Verdict table_reproduction() {
  Verdict v;
  const double r2 = std::sqrt(2.0);
  const double a0v1 = 2 * pi * pi, a0v3 = 3 * kS3 * pi * pi;
  const double v1a1 = 1 / (16 * pi * r2), v1a2 = pi / (8 * r2);
  const double v3a1 = 4 / (81 * pi * std::pow(3.0, 0.25)), v3a2 = 11 * pi / (27 * std::pow(3.0, 0.75));
  struct Row {
    const char* pot;
    Kinetic kinetic;
    double alpha1, alpha2;
  };
  const Row rows[] = {
      {"v1", Kinetic::Continuous, v1a1, v1a2},
      {"v1", Kinetic::Discrete, v1a1 + std::pow(a0v1, -0.5) / 32, v1a2 + std::sqrt(a0v1) / 32},
      {"v3", Kinetic::Continuous, v3a1, v3a2},
      {"v3", Kinetic::Discrete, v3a1 + std::pow(a0v3, -0.5) / 32, v3a2 + std::sqrt(a0v3) / 32},
  };
  double worst = 0.0;
  for (const auto& r : rows) {
    // Taylor data located numerically from the Fourier series.
    const TaylorWell w = TaylorWell::from(locate_minimum(builtin(r.pot)));
    const Alphas a = alphas(w, r.kinetic);
    worst = std::max({worst, rel(a.alpha1, r.alpha1), rel(a.alpha2, r.alpha2)});
  }
  v.expect(worst <= 1e-12, "8 entries, max relative error " + num(worst, 3) + " (tol 1e-12)");
  return v;
}

Verdict closed_form_oracles() {
  Verdict v;
  double worst = 0.0;
  for (const char* name : {"v1", "v2"}) {
    const Potential pot = builtin(name);
    for (const ReducedRational h : {ReducedRational{1, 2}, ReducedRational{1, 1}}) {
      const auto rep = discontinuity_report(pot, h);
      const double min_err =
          std::max(std::abs(rep.min_pd - rep.expected_pd), std::abs(rep.min_sigma - rep.expected_sigma));
      worst = std::max({worst, rep.max_error, min_err});
      v.expect(rep.pass && min_err <= 1e-6, std::string(name) + " h=" + std::to_string(h.p) + "/" +
                                                std::to_string(h.q) + " endpoint error " + num(rep.max_error, 3));
      if (std::string(name) == "v1" && h.q == 1) {
        const double gap = rep.min_pd - rep.min_sigma;
        v.expect(std::abs(gap - 2.0) <= 1e-6, "v1 h=1 gap " + num(gap, 12));
      }
    }
  }
  v.note("max error " + num(worst, 3) + " (tol 1e-6)");
  return v;
}

Verdict rate_of_d() {
  Verdict v;
  const Potential v1 = builtin("v1");
  std::vector<ReducedRational> hs;
  for (long q = 8; q <= 128; ++q) hs.push_back({1, q});
  const auto recs = compare(v1, hs, {}, {}, default_workers());
  std::vector<double> x, y;
  std::vector<double> remainder(129, std::numeric_limits<double>::quiet_NaN());
  const double a0 = 2 * pi * pi;
  for (const auto& r : recs) {
    if (!r.ok()) {
      v.expect(false, "q=" + std::to_string(r.q) + " failed: " + r.error);
      continue;
    }
    x.push_back(r.h);
    y.push_back(std::abs(r.d - 1.0));
    remainder[static_cast<std::size_t>(r.q)] = std::abs(r.d - d_leading(a0, r.h));
  }
  const FitResult fit = loglog_fit(x, y);
  v.expect(fit.slope >= 0.9 && fit.slope <= 1.1,
           "slope of log|d-1| over q=8..128: " + num(fit.slope) + " (window [0.9, 1.1])");
  double lo = 1e300, hi = -1e300;
  for (std::size_t q = 8; q <= 64; ++q) {
    const double ratio = remainder[q] / remainder[2 * q];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  v.expect(lo >= 3.0 && hi <= 5.0, "remainder ratio at h=1/q vs 1/(2q), q=8..64: [" + num(lo, 4) + ", " +
                                       num(hi, 4) + "] (window [3, 5])");
  return v;
}

Verdict bs_remainder() {
  Verdict v;
  for (const char* name : {"v1", "v3"}) {
    const auto rows = bs_vs_spec(builtin(name), Kinetic::Continuous, {0.02, 0.01});
    const double ratio = rows[0].diff / rows[1].diff;
    v.expect(ratio >= 6.0 && ratio <= 10.0, std::string(name) + " |E_spec - E0| ratio " + num(ratio, 4) +
                                                " (window [6, 10])");
  }
  return v;
}

Verdict scaling_exponents() {
  Verdict v;
  const auto grid = geometric_grid(0.01, 0.1, 10);
  struct Target {
    const char* name;
    double slope, tol;
  };
  for (const Target t : {Target{"v1", 1.0, 0.05}, Target{"v3", 1.0, 0.05}, Target{"v2", 4.0 / 3.0, 0.1}}) {
    const auto res = scaling_exponent(builtin(t.name), Kinetic::Continuous, grid, 1e-12, default_workers());
    v.expect(std::abs(res.fit.slope - t.slope) <= t.tol, std::string(t.name) + " slope " + num(res.fit.slope, 4) +
                                                             " (target " + num(t.slope, 4) + " +- " + num(t.tol) +
                                                             ")");
  }
  // Local exponents of the quartic well further into the semiclassical range.
  std::string local = "v2 local slopes:";
  const Potential v2 = builtin("v2");
  double prev_h = 0.0, prev_e = 0.0;
  for (double h : {0.1, 0.03, 0.01, 0.003, 0.001}) {
    const double e = min_spec_pc(v2, h, Kinetic::Continuous).min_eig;
    if (prev_h > 0.0) local += " " + num(std::log(prev_e / e) / std::log(prev_h / h), 4);
    prev_h = h;
    prev_e = e;
  }
  v.note(local + " on [0.1,0.03,0.01,0.003,0.001]");
  return v;
}

Verdict properties() {
  Verdict v;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> theta(0.0, 2 * pi);
  const std::vector<std::string> names{"v1", "v2", "v3", "v4"};
  std::vector<Potential> pots;
  for (const auto& n : names) pots.push_back(builtin(n));

  {
    int built = 0;
    bool hermitian = true;
    double sym = 0.0;
    for (const auto& pot : pots) {
      for (const ReducedRational h :
           {ReducedRational{1, 1}, {1, 2}, {2, 3}, {3, 7}, {5, 12}, {7, 16}, {13, 50}, {25, 64}}) {
        for (int trial = 0; trial < 4; ++trial) {
          const double t1 = theta(rng), t2 = theta(rng);
          const FloquetMatrix m = build_m(pot, h, t1, t2);
          ++built;
          for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j)
              if (m.entries(i, j) != std::conj(m.entries(j, i))) hermitian = false;
          const auto base = eig_hermitian(m);
          const double shift = 2 * pi * h.value();
          sym = std::max({sym, max_diff(base, eig_hermitian(build_m(pot, h, -t1, t2))),
                          max_diff(base, eig_hermitian(build_m(pot, h, t1 + shift, t2))),
                          max_diff(base, eig_hermitian(build_m(pot, h, t1, t2 + shift)))});
        }
      }
    }
    v.expect(hermitian, "Hermiticity exact on " + std::to_string(built) + " fibers");
    v.expect(sym <= 1e-10, "theta1 reflection and 2 pi p/q shifts: max deviation " + num(sym, 3));
  }

  {
    double worst = -1e300;
    for (const auto& pot : pots)
      for (Kinetic k : {Kinetic::Continuous, Kinetic::Discrete})
        for (double h : {0.05, 0.2}) {
          double prev = 1e300;
          for (int n = std::max(2, pot.bandwidth()); n <= 512; n *= 2) {
            const double e = hill_lowest({pot, h, k, n, 0.0});
            const double norm = std::pow(2 * pi * h * n, 2) + 2.0;
            worst = std::max(worst, e - prev - std::max(1e-13, 64 * std::numeric_limits<double>::epsilon() * norm));
            prev = e;
          }
        }
    v.expect(worst <= 0.0, "Galerkin minima nonincreasing in the basis size");
  }

  {
    std::vector<ReducedRational> hs;
    for (long q = 8; q <= 64; ++q) hs.push_back({1, q});
    double max_d = -1e300, max_hull = -1e300;
    bool all_ok = true;
    for (const auto& pot : pots) {
      for (const auto& r : compare(pot, hs, {}, {}, default_workers())) {
        all_ok = all_ok && r.ok();
        max_d = std::max(max_d, r.D);
        max_hull = std::max(max_hull, r.min_sigma - r.min_pd);
      }
    }
    v.expect(all_ok && max_hull <= 1e-8, "min Sigma - min Spec(P_d) <= " + num(max_hull, 3));
    v.expect(all_ok && max_d <= 1.0 + 1e-4, "max D(h), q=8..64, v1..v4: " + num(max_d, 8) + " (bound 1 + 1e-4)");
  }

  {
    std::uniform_real_distribution<double> pt(-3.0, 3.0);
    std::uniform_int_distribution<int> size(1, 8);
    auto sample = [&] {
      std::vector<double> s(static_cast<std::size_t>(size(rng)));
      for (double& x : s) x = pt(rng);
      return SpectrumSample(std::move(s));
    };
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      const auto a = sample(), b = sample(), c = sample();
      const double ab = hausdorff(a, b);
      worst = std::max({worst, std::abs(ab - hausdorff(b, a)), hausdorff(a, a), ab - hausdorff(a, c) - hausdorff(c, b),
                        -ab});
    }
    v.expect(worst <= 1e-15, "Hausdorff symmetry, identity, triangle on 500 triples");
  }

  {
    std::mt19937_64 wr(5);
    std::uniform_real_distribution<double> a0(1.0, 10.0), small(-1.0, 1.0);
    std::vector<TaylorWell> wells{{1.0, 0.0, 0.0, 0.0},
                                  {2 * pi * pi, 0.0, -2 * std::pow(pi, 4) / 3, 0.0},
                                  {3 * kS3 * pi * pi, -2 * std::pow(pi, 3), -3 * kS3 * std::pow(pi, 4),
                                   2 * std::pow(pi, 5)}};
    for (int i = 0; i < 8; ++i) wells.push_back({a0(wr), small(wr), small(wr), small(wr)});
    double series = 0.0, numeric = 0.0;
    for (const auto& w : wells) {
      const double big_r = oracle::branch_radius(w);
      const auto bc = b_coeffs(w), cc = c_coeffs(w), bs = b_coeffs_series(w), cs = c_coeffs_series(w);
      const auto bn = oracle::numeric_b(w), cn = oracle::numeric_c(w);
      const auto beta = beta_closed_form(w);
      const auto beta_s = invert_series(w, 4);
      for (std::size_t k = 0; k < 4; ++k) {
        const double rk = std::pow(big_r, static_cast<double>(k));
        const double sb = std::max(std::abs(bc[k]), std::abs(bc[0]) / rk);
        const double sc = std::max(std::abs(cc[k]), std::abs(cc[0]) / rk);
        const double sbeta = std::max(std::abs(beta[k]), std::abs(beta[0]) / rk);
        series = std::max({series, std::abs(bs[k] - bc[k]) / sb, std::abs(cs[k] - cc[k]) / sc,
                           std::abs(beta_s[k] - beta[k]) / sbeta});
        numeric = std::max({numeric, std::abs(bn[k] - bc[k]) / sb, std::abs(cn[k] - cc[k]) / sc});
      }
    }
    v.expect(series <= 1e-12, "beta/b/c closed forms vs series pipeline: " + num(series, 3) + " (tol 1e-12)");
    v.expect(numeric <= 1e-8, "b/c closed forms vs Cauchy-integral oracle: " + num(numeric, 3) + " (tol 1e-8)");
  }

  {
    const TaylorWell harmonic{1.0, 0.0, 0.0, 0.0};
    double worst = 0.0;
    for (double h : {1e-3, 0.01, 0.05, 0.1, 0.3}) {
      worst = std::max({worst, std::abs(e0(harmonic, Kinetic::Continuous, h) - h),
                        std::abs(e0(harmonic, Kinetic::Discrete, h) - (h - h * h / 16))});
    }
    v.expect(worst <= 1e-15, "harmonic e0 = h and h - h^2/16: max deviation " + num(worst, 3));
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> allowed;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--allow-fail") allowed.insert(std::atoi(argv[++i]));

  // Warnings about regimes are expected in some sweeps; keep the report clean.
  set_warning_handler([](const std::string&) {});

  struct Criterion {
    int id;
    const char* title;
    double budget;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "action coefficient table", 1.0, table_reproduction},
      {2, "closed-form spectra at h = 1/2, 1", 10.0, closed_form_oracles},
      {3, "rate of d(h) and its second-order remainder", 300.0, rate_of_d},
      {4, "Bohr-Sommerfeld remainder of the ground state", 30.0, bs_remainder},
      {5, "scaling exponents of min Spec(P_c(h))", 60.0, scaling_exponents},
      {6, "property suites", 0.0, properties},
  };

  int blocking = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.expect(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0.0) v.expect(secs < c.budget, "runtime " + num(secs, 3) + " s (budget " + num(c.budget) + " s)");
    const bool waived = !v.pass && allowed.count(c.id);
    std::printf("criterion %d: %s  %s%s\n", c.id, v.pass ? "PASS" : "FAIL", c.title,
                waived ? "  [known unattainable, not blocking]" : "");
    for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    if (!v.pass && !waived) ++blocking;
  }
  return blocking == 0 ? 0 : 1;
}
