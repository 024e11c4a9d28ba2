#include "semispec/semispec.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "semispec/bohr_sommerfeld.hpp"
#include "semispec/error.hpp"
#include "semispec/experiments.hpp"
#include "semispec/floquet.hpp"
#include "semispec/hill.hpp"
#include "semispec/log.hpp"
#include "semispec/parallel.hpp"
#include "semispec/potential.hpp"
#include "semispec/spectra.hpp"
#include "semispec/table.hpp"

struct semispec_potential {
  semispec::Potential pot;
};

struct semispec_table {
  semispec::Table table;
  std::string scratch;
};

namespace {

using namespace semispec;

std::string& last_error() {
  thread_local std::string msg;
  return msg;
}

int status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return SEMISPEC_ERR_INVALID_ARGUMENT;
    case ErrorKind::Io: return SEMISPEC_ERR_IO;
    case ErrorKind::DataCorruption: return SEMISPEC_ERR_DATA_CORRUPTION;
    case ErrorKind::TruncationFailure: return SEMISPEC_ERR_TRUNCATION;
    case ErrorKind::DegenerateWell: return SEMISPEC_ERR_DEGENERATE_WELL;
    case ErrorKind::NonConvergence: return SEMISPEC_ERR_NON_CONVERGENCE;
    case ErrorKind::NotAnOracle: return SEMISPEC_ERR_NOT_AN_ORACLE;
  }
  return SEMISPEC_ERR_INTERNAL;
}

template <class F>
int guard(F&& f) {
  try {
    f();
    last_error().clear();
    return SEMISPEC_OK;
  } catch (const Error& e) {
    last_error() = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error() = "out of memory";
  } catch (const std::exception& e) {
    last_error() = e.what();
  } catch (...) {
    last_error() = "unknown error";
  }
  return SEMISPEC_ERR_INTERNAL;
}

void need(const void* ptr, const char* what) { require(ptr != nullptr, std::string(what) + " must not be NULL"); }

const Potential& pot_of(const semispec_potential* p) {
  need(p, "potential");
  return p->pot;
}

Kinetic kinetic_of(semispec_kinetic k) {
  require(k == SEMISPEC_KINETIC_CONTINUOUS || k == SEMISPEC_KINETIC_DISCRETE, "unknown kinetic symbol");
  return k == SEMISPEC_KINETIC_CONTINUOUS ? Kinetic::Continuous : Kinetic::Discrete;
}

SpectrumMode mode_of(semispec_mode m) {
  require(m == SEMISPEC_MODE_PD || m == SEMISPEC_MODE_SIGMA, "unknown spectrum mode");
  return m == SEMISPEC_MODE_PD ? SpectrumMode::Pd : SpectrumMode::Sigma;
}

semispec_options options_or_default(const semispec_options* opts) {
  semispec_options o;
  semispec_options_default(&o);
  if (opts) o = *opts;
  require(o.n1 >= 2 && o.n2 >= 2, "grid sizes n1, n2 must be >= 2");
  require(o.coarse1 >= 2 && o.coarse2 >= 2, "coarse grid sizes must be >= 2");
  require(o.min_tol > 0.0 && o.hill_tol > 0.0, "tolerances must be positive");
  return o;
}

FloquetGrids grids_of(const semispec_options& o) { return {o.n1, o.n2, o.coarse1, o.coarse2, o.min_tol}; }
Tolerances tols_of(const semispec_options& o) { return {o.min_tol, o.hill_tol}; }
unsigned workers_of(const semispec_options& o) { return o.workers == 0 ? default_workers() : o.workers; }

ReducedRational rational(long p, long q) { return ReducedRational::make(p, q); }

std::vector<ReducedRational> rationals(const long* p, const long* q, size_t n) {
  need(p, "p");
  need(q, "q");
  std::vector<ReducedRational> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(rational(p[i], q[i]));
  return out;
}

std::vector<double> doubles(const double* v, size_t n) {
  if (n > 0) need(v, "array");
  return std::vector<double>(v, v + n);
}

TaylorWell taylor_of(const double a[4]) {
  need(a, "Taylor data");
  return {a[0], a[1], a[2], a[3]};
}

void emit(semispec_table** out, Table t) {
  need(out, "output table");
  *out = new semispec_table{std::move(t), {}};
}

Table band_table(long p, long q, const IntervalUnion& bands) {
  Table t = banded_table();
  append_band_rows(t, p, q, bands);
  return t;
}

}  // namespace

extern "C" {

const char* semispec_version(void) { return SEMISPEC_VERSION_STRING; }

const char* semispec_last_error(void) { return last_error().c_str(); }

void semispec_set_warning_handler(semispec_warning_fn fn, void* user) {
  if (fn == nullptr) {
    set_warning_handler([](const std::string& m) { std::fprintf(stderr, "semispec: warning: %s\n", m.c_str()); });
    return;
  }
  set_warning_handler([fn, user](const std::string& m) { fn(m.c_str(), user); });
}

void semispec_options_default(semispec_options* opts) {
  if (!opts) return;
  const FloquetGrids g;
  const Tolerances t;
  *opts = {g.n1, g.n2, g.coarse1, g.coarse2, t.min_tol, t.hill_tol, 0.0, 0};
}

int semispec_reduce(long p, long q, long* p_out, long* q_out) {
  return guard([&] {
    need(p_out, "p_out");
    need(q_out, "q_out");
    const ReducedRational r = rational(p, q);
    *p_out = r.p;
    *q_out = r.q;
  });
}

int semispec_rational_approx(double h, long max_den, long* p_out, long* q_out) {
  return guard([&] {
    need(p_out, "p_out");
    need(q_out, "q_out");
    const ReducedRational r = ReducedRational::approximate(h, max_den);
    *p_out = r.p;
    *q_out = r.q;
  });
}

int semispec_potential_builtin(const char* name, semispec_potential** out) {
  return guard([&] {
    need(name, "name");
    need(out, "output");
    *out = new semispec_potential{builtin(name)};
  });
}

int semispec_potential_load(const char* spec, semispec_potential** out) {
  return guard([&] {
    need(spec, "potential spec");
    need(out, "output");
    *out = new semispec_potential{load_potential(spec)};
  });
}

int semispec_potential_from_coeffs(const char* name, size_t n, const int* betas, const double* re, const double* im,
                                   double truncation_tol, semispec_potential** out) {
  return guard([&] {
    need(out, "output");
    if (n > 0) {
      need(betas, "betas");
      need(re, "re");
    }
    CoeffMap m;
    for (size_t i = 0; i < n; ++i) m[betas[i]] = Complex(re[i], im ? im[i] : 0.0);
    for (const auto& [beta, w] : CoeffMap(m))
      if (!m.count(-beta)) m[-beta] = std::conj(w);
    *out = new semispec_potential{Potential(name ? name : "custom", m, truncation_tol)};
  });
}

void semispec_potential_free(semispec_potential* pot) { delete pot; }

const char* semispec_potential_name(const semispec_potential* pot) { return pot ? pot->pot.name().c_str() : ""; }

int semispec_potential_bandwidth(const semispec_potential* pot) { return pot ? pot->pot.bandwidth() : 0; }

int semispec_potential_eval(const semispec_potential* pot, double x, int order, double* out) {
  return guard([&] {
    need(out, "output");
    require(order >= 0 && order <= 8, "derivative order must be in [0, 8]");
    *out = pot_of(pot).eval(x, order);
  });
}

int semispec_potential_well(const semispec_potential* pot, semispec_well* out) {
  return guard([&] {
    need(out, "output");
    const WellData w = locate_minimum(pot_of(pot));
    *out = {w.x0, w.v_min, {w.a[0], w.a[1], w.a[2], w.a[3]}, w.degenerate ? 1 : 0};
  });
}

int semispec_floquet_matrix(const semispec_potential* pot, long p, long q, double theta1, double theta2, double* re,
                            double* im) {
  return guard([&] {
    need(re, "re");
    need(im, "im");
    const FloquetMatrix m = build_m(pot_of(pot), rational(p, q), theta1, theta2);
    for (int r = 0; r < m.dim; ++r)
      for (int c = 0; c < m.dim; ++c) {
        re[r * m.dim + c] = m.entries(r, c).real();
        im[r * m.dim + c] = m.entries(r, c).imag();
      }
  });
}

int semispec_floquet_eigenvalues(const semispec_potential* pot, long p, long q, double theta1, double theta2,
                                 double* eigenvalues) {
  return guard([&] {
    need(eigenvalues, "eigenvalues");
    const auto ev = eig_hermitian(build_m(pot_of(pot), rational(p, q), theta1, theta2));
    std::copy(ev.begin(), ev.end(), eigenvalues);
  });
}

int semispec_min_spec(const semispec_potential* pot, long p, long q, semispec_mode mode, const semispec_options* opts,
                      double* out) {
  return guard([&] {
    need(out, "output");
    const semispec_options o = options_or_default(opts);
    *out = min_spec(pot_of(pot), rational(p, q), mode_of(mode), o.min_tol, grids_of(o));
  });
}

int semispec_band_union(const semispec_potential* pot, long p, long q, semispec_mode mode,
                        const semispec_options* opts, semispec_table** out) {
  return guard([&] {
    const semispec_options o = options_or_default(opts);
    const ReducedRational h = rational(p, q);
    emit(out, band_table(h.p, h.q, band_union(pot_of(pot), h, mode_of(mode), grids_of(o))));
  });
}

int semispec_butterfly(const semispec_potential* pot, const long* p, const long* q, size_t n, semispec_mode mode,
                       const semispec_options* opts, semispec_table** samples, semispec_table** bands) {
  return guard([&] {
    need(samples, "samples");
    need(bands, "bands");
    require(n > 0, "butterfly: empty h list");
    const semispec_options o = options_or_default(opts);
    const FloquetGrids g = grids_of(o);
    const auto slices = butterfly(pot_of(pot), rationals(p, q, n), {mode_of(mode)}, g, workers_of(o));
    Table s = long_format_table(), b = banded_table();
    for (const auto& slice : slices) {
      append_long_rows(s, slice.sample);
      const IntervalUnion merged = o.gap_tol > 0.0 ? merge(slice.sample, o.gap_tol) : slice.bands;
      append_band_rows(b, slice.h.p, slice.h.q, merged);
    }
    auto* st = new semispec_table{std::move(s), {}};
    auto* bt = new semispec_table{std::move(b), {}};
    *samples = st;
    *bands = bt;
  });
}

int semispec_hill_min(const semispec_potential* pot, double h, semispec_kinetic kinetic, double tol, double* min_eig,
                      int* n_final) {
  return guard([&] {
    need(min_eig, "min_eig");
    const HillResult r = min_spec_pc(pot_of(pot), h, kinetic_of(kinetic), tol);
    *min_eig = r.min_eig;
    if (n_final) *n_final = r.n_final;
  });
}

int semispec_hill_table(const semispec_potential* pot, const double* h, size_t n, semispec_kinetic kinetic,
                        const semispec_options* opts, semispec_table** out) {
  return guard([&] {
    const semispec_options o = options_or_default(opts);
    const auto hs = doubles(h, n);
    const Potential& v = pot_of(pot);
    const Kinetic k = kinetic_of(kinetic);
    std::vector<HillResult> minima(hs.size());
    parallel_for(hs.size(), workers_of(o), [&](std::size_t i) { minima[i] = min_spec_pc(v, hs[i], k, o.hill_tol); });
    emit(out, hill_table(v.name(), k, hs, minima));
  });
}

int semispec_bloch_sweep(const semispec_potential* pot, double h, semispec_kinetic kinetic, int n_k, int n_modes,
                         double* kappa, double* minima) {
  return guard([&] {
    need(kappa, "kappa");
    need(minima, "minima");
    const auto sweep = bloch_sweep(pot_of(pot), h, kinetic_of(kinetic), n_k, n_modes);
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      kappa[i] = sweep[i].first;
      minima[i] = sweep[i].second;
    }
  });
}

int semispec_taylor_well(const semispec_potential* pot, double a[4]) {
  return guard([&] {
    need(a, "output");
    const TaylorWell t = TaylorWell::from(locate_minimum(pot_of(pot)));
    a[0] = t.a0;
    a[1] = t.a1;
    a[2] = t.a2;
    a[3] = t.a3;
  });
}

int semispec_bs_model_make(const double a[4], semispec_kinetic kinetic, semispec_bs_model* out) {
  return guard([&] {
    need(out, "output");
    const BSModel m = make_model(taylor_of(a), kinetic_of(kinetic));
    for (int i = 0; i < 4; ++i) {
      out->beta[i] = m.beta[static_cast<std::size_t>(i)];
      out->b[i] = m.b[static_cast<std::size_t>(i)];
      out->c[i] = m.c[static_cast<std::size_t>(i)];
    }
    out->alpha1 = m.alpha1;
    out->alpha2 = m.alpha2;
  });
}

int semispec_bs_alphas_closed_form(const double a[4], semispec_kinetic kinetic, double* alpha1, double* alpha2) {
  return guard([&] {
    need(alpha1, "alpha1");
    need(alpha2, "alpha2");
    const Alphas al = alphas_closed_form(taylor_of(a), kinetic_of(kinetic));
    *alpha1 = al.alpha1;
    *alpha2 = al.alpha2;
  });
}

int semispec_bs_e0(const double a[4], semispec_kinetic kinetic, double h, double* out) {
  return guard([&] {
    need(out, "output");
    *out = e0(taylor_of(a), kinetic_of(kinetic), h);
  });
}

int semispec_d_leading(double a0, double h, double* out) {
  return guard([&] {
    need(out, "output");
    *out = d_leading(a0, h);
  });
}

int semispec_bs_table(const char* name, const double a[4], semispec_kinetic kinetic, const double* h, size_t n,
                      semispec_table** out) {
  return guard([&] {
    const BSModel m = make_model(taylor_of(a), kinetic_of(kinetic));
    emit(out, bs_table(name ? name : "custom", m, doubles(h, n)));
  });
}

int semispec_compare(const semispec_potential* pot, const long* p, const long* q, size_t n,
                     const semispec_options* opts, semispec_table** out) {
  return guard([&] {
    const semispec_options o = options_or_default(opts);
    const auto records = compare(pot_of(pot), rationals(p, q, n), tols_of(o), grids_of(o), workers_of(o));
    emit(out, comparison_table(records));
  });
}

int semispec_loglog_fit(const double* x, const double* y, size_t n, semispec_fit* out) {
  return guard([&] {
    need(out, "output");
    const FitResult f = loglog_fit(doubles(x, n), doubles(y, n));
    *out = {f.slope, f.intercept, f.r2, f.points_used};
  });
}

int semispec_inputs_digest(const double* x, const double* y, size_t n, char out[17]) {
  return guard([&] {
    need(out, "output");
    const std::string d = inputs_digest(doubles(x, n), doubles(y, n));
    std::memcpy(out, d.c_str(), 17);
  });
}

int semispec_geometric_grid(double lo, double hi, int n, double* out) {
  return guard([&] {
    need(out, "output");
    const auto g = geometric_grid(lo, hi, n);
    std::copy(g.begin(), g.end(), out);
  });
}

int semispec_scaling(const semispec_potential* pot, semispec_kinetic kinetic, const double* h, size_t n,
                     const semispec_options* opts, semispec_fit* fit, semispec_table** out) {
  return guard([&] {
    need(fit, "fit");
    const semispec_options o = options_or_default(opts);
    const Kinetic k = kinetic_of(kinetic);
    const ScalingResult r = scaling_exponent(pot_of(pot), k, doubles(h, n), o.hill_tol, workers_of(o));
    *fit = {r.fit.slope, r.fit.intercept, r.fit.r2, r.fit.points_used};
    if (out) emit(out, hill_table(pot_of(pot).name(), k, r.hs, r.minima));
  });
}

int semispec_bs_vs_spec(const semispec_potential* pot, semispec_kinetic kinetic, const double* h, size_t n,
                        const semispec_options* opts, semispec_table** out) {
  return guard([&] {
    const semispec_options o = options_or_default(opts);
    const auto rows =
        bs_vs_spec(pot_of(pot), kinetic_of(kinetic), doubles(h, n), tols_of(o), grids_of(o), workers_of(o));
    emit(out, bs_comparison_table(rows));
  });
}

int semispec_hoelder(const semispec_potential* pot, long q, const semispec_options* opts,
                     semispec_hoelder_summary* summary, semispec_table** out) {
  return guard([&] {
    need(summary, "summary");
    const semispec_options o = options_or_default(opts);
    const HoelderReport r = hoelder_check(pot_of(pot), q, grids_of(o), workers_of(o));
    *summary = {r.max, r.median, r.flagged ? 1 : 0};
    if (out) emit(out, hoelder_table(r));
  });
}

int semispec_discontinuity(const semispec_potential* pot, long p, long q, const semispec_options* opts,
                           semispec_disc* report, semispec_table** bands) {
  return guard([&] {
    need(report, "report");
    const semispec_options o = options_or_default(opts);
    const DiscontinuityReport r = discontinuity_report(pot_of(pot), rational(p, q), grids_of(o));
    *report = {r.min_pd, r.min_sigma, r.expected_pd, r.expected_sigma, r.max_error, r.pass ? 1 : 0};
    if (bands) {
      Table t({"mode", "source", "band_lo", "band_hi"});
      auto add = [&](const char* mode, const char* source, const std::vector<Interval>& iv) {
        for (const auto& i : iv) t.add_row({std::string(mode), std::string(source), i.lo, i.hi});
      };
      add("pd", "computed", r.pd_bands.intervals);
      add("pd", "expected", r.expected_pd_bands);
      add("sigma", "computed", r.sigma_bands.intervals);
      add("sigma", "expected", r.expected_sigma_bands);
      emit(bands, std::move(t));
    }
  });
}

int semispec_hausdorff(const double* a, size_t na, const double* b, size_t nb, double* out) {
  return guard([&] {
    need(out, "output");
    auto va = doubles(a, na), vb = doubles(b, nb);
    *out = hausdorff(SpectrumSample(std::move(va)), SpectrumSample(std::move(vb)));
  });
}

int semispec_merge(const double* values, size_t n, double gap_tol, semispec_table** out) {
  return guard([&] {
    const IntervalUnion u = merge(SpectrumSample(doubles(values, n)), gap_tol);
    Table t({"band_lo", "band_hi"});
    for (const auto& i : u.intervals) t.add_row({i.lo, i.hi});
    emit(out, std::move(t));
  });
}

void semispec_table_free(semispec_table* table) { delete table; }

size_t semispec_table_rows(const semispec_table* table) { return table ? table->table.row_count() : 0; }

size_t semispec_table_cols(const semispec_table* table) { return table ? table->table.columns().size() : 0; }

const char* semispec_table_column(const semispec_table* table, size_t col) {
  if (!table || col >= table->table.columns().size()) return nullptr;
  return table->table.columns()[col].c_str();
}

int semispec_table_number(const semispec_table* table, size_t row, size_t col, double* out) {
  return guard([&] {
    need(table, "table");
    need(out, "output");
    *out = table->table.number(row, col);
  });
}

const char* semispec_table_text(semispec_table* table, size_t row, size_t col) {
  const char* result = nullptr;
  guard([&] {
    need(table, "table");
    table->scratch = table->table.text(row, col);
    result = table->scratch.c_str();
  });
  return result;
}

const char* semispec_table_csv(semispec_table* table) {
  const char* result = nullptr;
  guard([&] {
    need(table, "table");
    table->scratch = table->table.to_csv();
    result = table->scratch.c_str();
  });
  return result;
}

int semispec_table_append(semispec_table* dst, const semispec_table* src) {
  return guard([&] {
    need(dst, "destination table");
    need(src, "source table");
    dst->table.append(src->table);
  });
}

int semispec_table_write_csv(const semispec_table* table, const char* path) {
  return guard([&] {
    need(table, "table");
    need(path, "path");
    table->table.write_csv(path);
  });
}

}  // extern "C"
