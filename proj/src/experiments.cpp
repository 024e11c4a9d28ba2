#include "semispec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "semispec/error.hpp"
#include "semispec/parallel.hpp"

namespace semispec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Largest endpoint mismatch between two interval lists, infinite when the
// band counts differ.
double endpoint_error(const std::vector<Interval>& got, const std::vector<Interval>& want) {
  if (got.size() != want.size()) return std::numeric_limits<double>::infinity();
  double err = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i)
    err = std::max({err, std::abs(got[i].lo - want[i].lo), std::abs(got[i].hi - want[i].hi)});
  return err;
}

}  // namespace

std::vector<ReducedRational> dedupe(const std::vector<ReducedRational>& hs) {
  std::set<ReducedRational> seen;
  std::vector<ReducedRational> out;
  for (const auto& h : hs)
    if (seen.insert(h).second) out.push_back(h);
  return out;
}

std::vector<ComparisonRecord> compare(const Potential& pot, const std::vector<ReducedRational>& hs,
                                      const Tolerances& tols, const FloquetGrids& grids, unsigned workers) {
  require(!hs.empty(), "compare: empty h list");
  const auto unique = dedupe(hs);
  for (const auto& h : unique)
    require(h.value() <= 2.0, "compare: h=" + std::to_string(h.p) + "/" + std::to_string(h.q) + " exceeds 2");
  std::vector<ComparisonRecord> records(unique.size());
  parallel_for(unique.size(), workers, [&](std::size_t i) {
    const ReducedRational h = unique[i];
    ComparisonRecord r{h.p, h.q, h.value(), kNaN, kNaN, kNaN, kNaN, kNaN, {}};
    try {
      r.min_pd = min_spec(pot, h, SpectrumMode::Pd, tols.min_tol, grids);
      r.min_sigma = min_spec(pot, h, SpectrumMode::Sigma, tols.min_tol, grids);
      r.min_pc = min_spec_pc(pot, h.value(), Kinetic::Continuous, tols.hill_tol).min_eig;
      r.d = r.min_pd / r.min_pc;
      r.D = r.min_sigma / r.min_pc;
    } catch (const Error& e) {
      r.error = e.what();
    }
    records[i] = std::move(r);
  });
  return records;
}

Table comparison_table(const std::vector<ComparisonRecord>& records) {
  Table t({"p", "q", "h", "min_pd", "min_sigma", "min_pc", "d", "D", "status"});
  for (const auto& r : records)
    t.add_row({static_cast<std::int64_t>(r.p), static_cast<std::int64_t>(r.q), r.h, r.min_pd, r.min_sigma, r.min_pc,
               r.d, r.D, r.ok() ? std::string("ok") : "failed: " + r.error});
  return t;
}

FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size(), "loglog_fit: xs and ys differ in length");
  require(xs.size() >= 3, "loglog_fit: needs at least 3 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      fail(ErrorKind::InvalidArgument, "loglog_fit: nonpositive or non-finite data at index " + std::to_string(i));
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  require(sxx > 0.0, "loglog_fit: all x values coincide");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  f.points_used = static_cast<int>(n);
  return f;
}

std::string inputs_digest(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
  };
  for (double x : xs) feed(format_double(x) + ",");
  feed(";");
  for (double y : ys) feed(format_double(y) + ",");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  require(lo > 0.0 && hi > lo, "geometric_grid: need 0 < lo < hi");
  require(n >= 2, "geometric_grid: need at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ScalingResult scaling_exponent(const Potential& pot, Kinetic kinetic, const std::vector<double>& hs, double hill_tol,
                               unsigned workers) {
  require(hs.size() >= 3, "scaling_exponent: needs at least 3 h values");
  ScalingResult out;
  out.hs = hs;
  out.minima.resize(hs.size());
  parallel_for(hs.size(), workers, [&](std::size_t i) { out.minima[i] = min_spec_pc(pot, hs[i], kinetic, hill_tol); });
  std::vector<double> ys;
  ys.reserve(hs.size());
  for (const auto& m : out.minima) ys.push_back(m.min_eig);
  out.fit = loglog_fit(hs, ys);
  return out;
}

std::vector<BSComparison> bs_vs_spec(const Potential& pot, Kinetic kinetic, const std::vector<double>& hs,
                                     const Tolerances& tols, const FloquetGrids& grids, unsigned workers) {
  require(!hs.empty(), "bs_vs_spec: empty h list");
  const WellData well = locate_minimum(pot);
  const TaylorWell taylor = TaylorWell::from(well);
  std::vector<BSComparison> rows(hs.size());
  parallel_for(hs.size(), workers, [&](std::size_t i) {
    const double h = hs[i];
    double spec = 0.0;
    if (kinetic == Kinetic::Continuous) {
      spec = min_spec_pc(pot, h, kinetic, tols.hill_tol).min_eig;
    } else {
      spec = min_spec(pot, ReducedRational::approximate(h), SpectrumMode::Pd, tols.min_tol, grids);
    }
    BSComparison r{h, spec - well.v_min, e0(taylor, kinetic, h), 0.0};
    r.diff = std::abs(r.e_spec - r.e_bs);
    rows[i] = r;
  });
  return rows;
}

HoelderReport hoelder_check(const Potential& pot, long q, const FloquetGrids& grids, unsigned workers) {
  require(q >= 2, "hoelder_check: q must be >= 2");
  std::vector<IntervalUnion> unions(static_cast<std::size_t>(q));
  parallel_for(unions.size(), workers, [&](std::size_t i) {
    const long p = static_cast<long>(i) + 1;
    const long g = std::gcd(p, q);
    const ReducedRational h{p / g, q / g};
    const SpectrumSample s = sigma_h(pot, h, grids.n1, grids.n2);
    unions[i] = merge(s, default_gap_tol(pot, h, SpectrumMode::Sigma, grids.n1, grids.n2));
  });
  HoelderReport rep;
  rep.q = q;
  const double scale = std::sqrt(static_cast<double>(q));
  for (long p = 1; p < q; ++p) {
    rep.ps.push_back(p);
    rep.ratios.push_back(hausdorff(unions[static_cast<std::size_t>(p - 1)], unions[static_cast<std::size_t>(p)]) *
                         scale);
  }
  rep.max = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.median = median_of(rep.ratios);
  rep.flagged = rep.max > 10.0 * rep.median;
  return rep;
}

std::optional<std::string> identify_builtin(const Potential& pot) {
  for (const char* name : {"v1", "v2", "v3"}) {
    const Potential candidate = builtin(name);
    const CoeffMap& ref = candidate.coeffs();
    if (ref.size() != pot.coeffs().size()) continue;
    bool same = true;
    for (const auto& [beta, w] : ref) {
      if (std::abs(pot.coefficient(beta) - w) > 1e-14) {
        same = false;
        break;
      }
    }
    if (same) return std::string(name);
  }
  return std::nullopt;
}

DiscontinuityReport discontinuity_report(const Potential& pot, ReducedRational h, const FloquetGrids& grids,
                                         double tol) {
  const auto name = identify_builtin(pot);
  const bool half = h.p == 1 && h.q == 2, one = h.p == 1 && h.q == 1;
  if (!name || (*name != "v1" && *name != "v2") || !(half || one))
    fail(ErrorKind::NotAnOracle, "no closed-form spectrum for potential '" + pot.name() + "' at h=" +
                                     std::to_string(h.p) + "/" + std::to_string(h.q) +
                                     " (oracles: v1, v2 at h = 1/2, 1)");
  DiscontinuityReport rep;
  rep.potential = *name;
  rep.h = h;
  const double r5 = std::sqrt(5.0);
  if (*name == "v1" && half) {
    rep.expected_pd_bands = {{3.0 - r5, 2.0}, {4.0, 3.0 + r5}};
    rep.expected_sigma_bands = {{3.0 - r5, 3.0 + r5}};
  } else if (*name == "v1") {
    rep.expected_pd_bands = {{2.0, 6.0}};
    rep.expected_sigma_bands = {{0.0, 6.0}};
  } else {
    rep.expected_pd_bands = {{1.0, 5.0}};
    rep.expected_sigma_bands = {{0.0, 5.0}};
  }
  rep.expected_pd = rep.expected_pd_bands.front().lo;
  rep.expected_sigma = rep.expected_sigma_bands.front().lo;
  rep.pd_bands = band_union(pot, h, SpectrumMode::Pd, grids);
  rep.sigma_bands = band_union(pot, h, SpectrumMode::Sigma, grids);
  rep.min_pd = rep.pd_bands.intervals.front().lo;
  rep.min_sigma = rep.sigma_bands.intervals.front().lo;
  rep.max_error = std::max(endpoint_error(rep.pd_bands.intervals, rep.expected_pd_bands),
                           endpoint_error(rep.sigma_bands.intervals, rep.expected_sigma_bands));
  rep.pass = rep.max_error <= tol;
  return rep;
}

Table bs_table(const std::string& name, const BSModel& model, const std::vector<double>& hs) {
  Table t({"potential", "kinetic", "a0", "a1", "a2", "a3", "alpha1", "alpha2", "h", "E0", "d_leading"});
  const TaylorWell& w = model.well;
  auto base = [&] {
    return std::vector<Cell>{name, std::string(to_string(model.kinetic)), w.a0, w.a1, w.a2, w.a3, model.alpha1,
                             model.alpha2};
  };
  if (hs.empty()) {
    auto row = base();
    row.insert(row.end(), {std::string(), std::string(), std::string()});
    t.add_row(std::move(row));
  }
  for (double h : hs) {
    auto row = base();
    row.insert(row.end(), {h, e0(w, model.kinetic, h), d_leading(w.a0, h)});
    t.add_row(std::move(row));
  }
  return t;
}

Table hill_table(const std::string& name, Kinetic kinetic, const std::vector<double>& hs,
                 const std::vector<HillResult>& minima) {
  require(hs.size() == minima.size(), "hill_table: size mismatch");
  Table t({"potential", "kinetic", "h", "N_final", "min_eig"});
  for (std::size_t i = 0; i < hs.size(); ++i)
    t.add_row({name, std::string(to_string(kinetic)), hs[i], static_cast<std::int64_t>(minima[i].n_final),
               minima[i].min_eig});
  return t;
}

Table bs_comparison_table(const std::vector<BSComparison>& rows) {
  Table t({"h", "E_spec", "E_bs", "abs_diff"});
  for (const auto& r : rows) t.add_row({r.h, r.e_spec, r.e_bs, r.diff});
  return t;
}

Table hoelder_table(const HoelderReport& report) {
  Table t({"p", "q", "r"});
  for (std::size_t i = 0; i < report.ps.size(); ++i)
    t.add_row({static_cast<std::int64_t>(report.ps[i]), static_cast<std::int64_t>(report.q), report.ratios[i]});
  return t;
}

}  // namespace semispec
