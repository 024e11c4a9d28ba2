#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semispec/semispec.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr double kPi = 3.14159265358979323846;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void config_error(const std::string& message) { throw CliError{kExitConfig, message}; }

int exit_code_for(int status) {
  switch (status) {
    case SEMISPEC_ERR_INVALID_ARGUMENT:
    case SEMISPEC_ERR_IO:
    case SEMISPEC_ERR_DATA_CORRUPTION:
    case SEMISPEC_ERR_NOT_AN_ORACLE:
      return kExitConfig;
    default:
      return kExitNumeric;
  }
}

void check(int status) {
  if (status != SEMISPEC_OK) throw CliError{exit_code_for(status), semispec_last_error()};
}

struct PotentialDeleter {
  void operator()(semispec_potential* p) const { semispec_potential_free(p); }
};
struct TableDeleter {
  void operator()(semispec_table* t) const { semispec_table_free(t); }
};
using PotentialPtr = std::unique_ptr<semispec_potential, PotentialDeleter>;
using TablePtr = std::unique_ptr<semispec_table, TableDeleter>;

PotentialPtr load(const std::string& spec) {
  semispec_potential* p = nullptr;
  check(semispec_potential_load(spec.c_str(), &p));
  return PotentialPtr(p);
}

std::string csv_of(const TablePtr& t) { return semispec_table_csv(t.get()); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Rational {
  long p = 1;
  long q = 1;
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

struct RunConfig {
  std::string potential = "v1";
  int n1 = 64;
  int n2 = 32;
  int coarse = 16;
  int n_k = 16;
  double min_tol = 1e-8;
  double hill_tol = 1e-12;
  double gap_tol = 0.0;  // 0: twice the grid error bound
  std::vector<std::string> h;
  long den = 0;
  std::string q_range;
  std::string h_range;
  std::string kinetic = "continuous";
  std::string mode = "both";
  std::string well;
  std::string out = ".";
  unsigned workers = 1;
  bool verify_bloch = false;
  std::uint64_t seed = 1;
  int cases = 50;
};

semispec_options options_of(const RunConfig& c) {
  semispec_options o;
  semispec_options_default(&o);
  o.n1 = c.n1;
  o.n2 = c.n2;
  o.coarse1 = o.coarse2 = c.coarse;
  o.min_tol = c.min_tol;
  o.hill_tol = c.hill_tol;
  o.gap_tol = c.gap_tol;
  o.workers = c.workers;
  return o;
}

std::vector<semispec_kinetic> kinetics_of(const std::string& k) {
  if (k == "continuous") return {SEMISPEC_KINETIC_CONTINUOUS};
  if (k == "discrete") return {SEMISPEC_KINETIC_DISCRETE};
  return {SEMISPEC_KINETIC_CONTINUOUS, SEMISPEC_KINETIC_DISCRETE};
}

const char* kinetic_name(semispec_kinetic k) { return k == SEMISPEC_KINETIC_CONTINUOUS ? "continuous" : "discrete"; }

long parse_long(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) config_error("invalid " + what + " '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) config_error("invalid " + what + " '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// "p/q" or a decimal.
Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  Rational r;
  if (slash != std::string::npos) {
    const long p = parse_long(s.substr(0, slash), "h numerator");
    const long q = parse_long(s.substr(slash + 1), "h denominator");
    check(semispec_reduce(p, q, &r.p, &r.q));
  } else {
    check(semispec_rational_approx(parse_double(s, "h"), 4096, &r.p, &r.q));
  }
  return r;
}

double parse_h_value(const std::string& s) {
  if (s.find('/') != std::string::npos) return parse_rational(s).value();
  const double h = parse_double(s, "h");
  if (!(h > 0.0)) config_error("h must be positive (got " + s + ")");
  return h;
}

std::vector<Rational> q_range_of(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 2) config_error("--q-range expects lo:hi (got '" + spec + "')");
  const long lo = parse_long(parts[0], "q-range bound"), hi = parse_long(parts[1], "q-range bound");
  if (lo < 1 || hi < lo) config_error("--q-range " + spec + " is empty");
  std::vector<Rational> out;
  for (long q = lo; q <= hi; ++q) out.push_back({1, q});
  return out;
}

std::vector<Rational> denominator_sweep(long den) {
  if (den < 1) config_error("--den must be >= 1");
  std::vector<Rational> out;
  for (long p = 1; p <= den; ++p) {
    const long g = std::gcd(p, den);
    out.push_back({p / g, den / g});
  }
  return out;
}

std::vector<double> h_range_of(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) config_error("--h-range expects lo:hi:n (got '" + spec + "')");
  const double lo = parse_double(parts[0], "h-range bound"), hi = parse_double(parts[1], "h-range bound");
  const long n = parse_long(parts[2], "h-range count");
  if (!(lo > 0.0) || !(hi > lo) || n < 2) config_error("--h-range " + spec + " needs 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  check(semispec_geometric_grid(lo, hi, static_cast<int>(n), out.data()));
  return out;
}

// Rational h selection; `fallback` applies when no selector was given.
std::vector<Rational> rational_hs(const RunConfig& c, const std::vector<Rational>& fallback) {
  std::vector<Rational> hs;
  if (!c.h.empty()) {
    for (const auto& s : c.h) hs.push_back(parse_rational(s));
  } else if (c.den > 0) {
    hs = denominator_sweep(c.den);
  } else if (!c.q_range.empty()) {
    hs = q_range_of(c.q_range);
  } else if (!c.h_range.empty()) {
    config_error("--h-range gives irrational-looking grids; use --h, --den or --q-range here");
  } else {
    hs = fallback;
  }
  if (hs.empty()) config_error("empty h selection");
  return hs;
}

std::vector<double> real_hs(const RunConfig& c, const std::vector<double>& fallback) {
  std::vector<double> hs;
  if (!c.h.empty()) {
    for (const auto& s : c.h) hs.push_back(parse_h_value(s));
  } else if (c.den > 0) {
    for (const auto& r : denominator_sweep(c.den)) hs.push_back(r.value());
  } else if (!c.q_range.empty()) {
    for (const auto& r : q_range_of(c.q_range)) hs.push_back(r.value());
  } else if (!c.h_range.empty()) {
    hs = h_range_of(c.h_range);
  } else {
    hs = fallback;
  }
  if (hs.empty()) config_error("empty h selection");
  return hs;
}

void split_pq(const std::vector<Rational>& hs, std::vector<long>& p, std::vector<long>& q) {
  for (const auto& r : hs) {
    p.push_back(r.p);
    q.push_back(r.q);
  }
}

json fit_json(const semispec_fit& f, const std::vector<double>& x, const std::vector<double>& y) {
  char digest[17];
  check(semispec_inputs_digest(x.data(), y.data(), x.size(), digest));
  return json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"r2", f.r2},
              {"points_used", f.points_used},
              {"inputs_digest", digest}};
}

// Collects outputs and stage timings; nothing touches disk until commit().
class Run {
 public:
  explicit Run(std::string command) : command_(std::move(command)), start_(Clock::now()) {}

  template <typename Fn>
  auto stage(const std::string& name, Fn&& fn) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      stages_.push_back({{"name", name}, {"seconds", seconds_since(t0)}});
    } else {
      auto result = fn();
      stages_.push_back({{"name", name}, {"seconds", seconds_since(t0)}});
      return result;
    }
  }

  void add(const std::string& file, std::string contents) { files_.emplace_back(file, std::move(contents)); }
  void add_json(const std::string& file, const json& j) { add(file, j.dump(2) + "\n"); }

  void commit(const RunConfig& c, const std::string& config_echo, const std::string& config_file,
              const std::vector<std::string>& argv) {
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{kExitConfig, "cannot create output directory " + c.out + ": " + ec.message()};
    json outputs = json::array();
    for (const auto& [name, contents] : files_) outputs.push_back(name);
    json manifest{{"tool", "semispec"},
                  {"version", semispec_version()},
                  {"command", command_},
                  {"argv", argv},
                  {"config", config_echo},
                  {"config_file", config_file.empty() ? json(nullptr) : json{{"path", config_file},
                                                                              {"contents", slurp(config_file)}}},
                  {"workers", c.workers},
                  {"outputs", outputs},
                  {"stages", stages_},
                  {"wall_time_seconds", seconds_since(start_)}};
    files_.emplace_back("manifest.json", manifest.dump(2) + "\n");
    for (const auto& [name, contents] : files_) write_atomic(dir / name, contents);
  }

 private:
  using Clock = std::chrono::steady_clock;

  static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }

  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static void write_atomic(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << contents;
      out.flush();
      if (!out) throw CliError{kExitConfig, "cannot write " + tmp.string()};
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
      fs::remove(tmp, ec);
      throw CliError{kExitConfig, "cannot write " + path.string()};
    }
  }

  std::string command_;
  Clock::time_point start_;
  json stages_ = json::array();
  std::vector<std::pair<std::string, std::string>> files_;
};

// Fails when any Bloch phase beats kappa = 0 by more than the Galerkin tolerance.
json verify_bloch(Run& run, const semispec_potential* pot, semispec_kinetic kinetic, const std::vector<double>& hs,
                  const RunConfig& c) {
  return run.stage("verify_bloch", [&] {
    std::string csv = "kinetic,h,n_modes,max_excess\n";
    double worst = -INFINITY;
    for (double h : hs) {
      double m = 0.0;
      int n_final = 0;
      check(semispec_hill_min(pot, h, kinetic, c.hill_tol, &m, &n_final));
      std::vector<double> kappa(static_cast<std::size_t>(c.n_k)), minima(kappa.size());
      check(semispec_bloch_sweep(pot, h, kinetic, c.n_k, n_final, kappa.data(), minima.data()));
      double excess = -INFINITY;
      for (double v : minima) excess = std::max(excess, minima.front() - v);
      worst = std::max(worst, excess);
      csv += std::string(kinetic_name(kinetic)) + "," + fmt(h) + "," + std::to_string(n_final) + "," + fmt(excess) +
             "\n";
      const double tol = std::max(c.hill_tol, 1e-13 * std::max(1.0, std::abs(m)));
      if (excess > tol)
        throw CliError{kExitNumeric, "Bloch check failed at h=" + fmt(h) + ": some kappa beats kappa = 0 by " +
                                         fmt(excess)};
    }
    run.add(std::string("bloch_") + kinetic_name(kinetic) + ".csv", csv);
    return json{{"kinetic", kinetic_name(kinetic)}, {"n_k", c.n_k}, {"max_excess", worst}};
  });
}

int cmd_butterfly(Run& run, const RunConfig& c) {
  auto hs = rational_hs(c, denominator_sweep(50));
  std::stable_sort(hs.begin(), hs.end(), [](const Rational& a, const Rational& b) {
    return a.q != b.q ? a.q < b.q : a.p < b.p;
  });
  std::vector<long> p, q;
  split_pq(hs, p, q);
  const auto pot = load(c.potential);
  const semispec_options o = options_of(c);
  std::vector<std::pair<std::string, semispec_mode>> modes;
  if (c.mode != "sigma") modes.emplace_back("pd", SEMISPEC_MODE_PD);
  if (c.mode != "pd") modes.emplace_back("sigma", SEMISPEC_MODE_SIGMA);
  for (const auto& [name, mode] : modes) {
    run.stage("butterfly_" + name, [&] {
      semispec_table *samples = nullptr, *bands = nullptr;
      check(semispec_butterfly(pot.get(), p.data(), q.data(), p.size(), mode, &o, &samples, &bands));
      const TablePtr s(samples), b(bands);
      run.add("butterfly_" + name + ".csv", csv_of(s));
      run.add("butterfly_" + name + "_bands.csv", csv_of(b));
      std::cout << name << ": " << semispec_table_rows(b.get()) << " bands over " << hs.size() << " values of h\n";
    });
  }
  return 0;
}

int cmd_compare(Run& run, const RunConfig& c) {
  const auto hs = rational_hs(c, q_range_of("8:128"));
  std::vector<long> p, q;
  split_pq(hs, p, q);
  const auto pot = load(c.potential);
  const semispec_options o = options_of(c);
  TablePtr table = run.stage("compare", [&] {
    semispec_table* t = nullptr;
    check(semispec_compare(pot.get(), p.data(), q.data(), p.size(), &o, &t));
    return TablePtr(t);
  });
  json fits = json::object();
  run.stage("fits", [&] {
    const std::size_t rows = semispec_table_rows(table.get());
    int failed = 0;
    for (const char* col : {"d", "D"}) {
      std::vector<double> x, y;
      for (std::size_t r = 0; r < rows; ++r) {
        if (std::string(semispec_table_text(table.get(), r, 8)) != "ok") continue;
        double h = 0.0, v = 0.0;
        check(semispec_table_number(table.get(), r, 2, &h));
        check(semispec_table_number(table.get(), r, col[0] == 'd' ? 6 : 7, &v));
        if (std::abs(v - 1.0) > 0.0) {
          x.push_back(h);
          y.push_back(std::abs(v - 1.0));
        }
      }
      const std::string key = std::string("abs_") + col + "_minus_1";
      if (x.size() < 3) {
        fits[key] = nullptr;
        continue;
      }
      semispec_fit f;
      check(semispec_loglog_fit(x.data(), y.data(), x.size(), &f));
      fits[key] = fit_json(f, x, y);
      std::cout << "|" << col << " - 1| ~ h^" << fmt(f.slope) << " (r2 " << fmt(f.r2) << ", " << x.size()
                << " points)\n";
    }
    for (std::size_t r = 0; r < rows; ++r)
      if (std::string(semispec_table_text(table.get(), r, 8)) != "ok") ++failed;
    if (failed) std::cerr << "semispec: " << failed << " record(s) failed; see the status column\n";
  });
  json extra = json::object();
  if (c.verify_bloch) {
    std::vector<double> hv;
    for (const auto& r : hs) hv.push_back(r.value());
    extra["bloch"] = verify_bloch(run, pot.get(), SEMISPEC_KINETIC_CONTINUOUS, hv, c);
  }
  run.add("compare.csv", csv_of(table));
  json doc{{"potential", semispec_potential_name(pot.get())}, {"x", "h"}, {"fits", fits}};
  if (!extra.empty()) doc["checks"] = extra;
  run.add_json("fits.json", doc);
  return 0;
}

int cmd_bs(Run& run, const RunConfig& c) {
  std::vector<double> hs;
  if (!c.h.empty() || c.den > 0 || !c.q_range.empty() || !c.h_range.empty()) hs = real_hs(c, {});
  std::vector<std::pair<std::string, std::array<double, 4>>> wells;
  run.stage("wells", [&] {
    if (!c.well.empty()) {
      const auto parts = split(c.well, ',');
      if (parts.size() != 4) config_error("--well expects a0,a1,a2,a3");
      std::array<double, 4> a{};
      for (int i = 0; i < 4; ++i) a[static_cast<std::size_t>(i)] = parse_double(parts[static_cast<std::size_t>(i)], "well coefficient");
      wells.emplace_back("well", a);
      return;
    }
    for (const auto& spec : split(c.potential, ',')) {
      const auto pot = load(spec);
      std::array<double, 4> a{};
      check(semispec_taylor_well(pot.get(), a.data()));
      wells.emplace_back(semispec_potential_name(pot.get()), a);
    }
  });
  TablePtr all;
  run.stage("alphas", [&] {
    for (const auto& [name, a] : wells) {
      for (const auto k : kinetics_of(c.kinetic)) {
        semispec_table* t = nullptr;
        check(semispec_bs_table(name.c_str(), a.data(), k, hs.empty() ? nullptr : hs.data(), hs.size(), &t));
        TablePtr tp(t);
        semispec_bs_model m;
        check(semispec_bs_model_make(a.data(), k, &m));
        std::cout << name << " " << kinetic_name(k) << ": alpha1 = " << fmt(m.alpha1) << ", alpha2 = " << fmt(m.alpha2)
                  << "\n";
        if (!all) all = std::move(tp);
        else check(semispec_table_append(all.get(), tp.get()));
      }
    }
  });
  run.add("bs.csv", csv_of(all));
  return 0;
}

int cmd_disc(Run& run, const RunConfig& c) {
  const auto hs = rational_hs(c, {{1, 2}, {1, 1}});
  const auto pot = load(c.potential);
  const semispec_options o = options_of(c);
  std::string csv = "p,q,mode,source,band_lo,band_hi\n";
  json reports = json::array();
  bool all_pass = true;
  for (const auto& h : hs) {
    run.stage("disc_" + std::to_string(h.p) + "_" + std::to_string(h.q), [&] {
      semispec_disc rep;
      semispec_table* bands = nullptr;
      check(semispec_discontinuity(pot.get(), h.p, h.q, &o, &rep, &bands));
      const TablePtr b(bands);
      for (std::size_t r = 0; r < semispec_table_rows(b.get()); ++r) {
        csv += std::to_string(h.p) + "," + std::to_string(h.q);
        for (std::size_t col = 0; col < 4; ++col) csv += std::string(",") + semispec_table_text(b.get(), r, col);
        csv += "\n";
      }
      reports.push_back({{"p", h.p},
                         {"q", h.q},
                         {"min_pd", rep.min_pd},
                         {"min_sigma", rep.min_sigma},
                         {"gap", rep.min_pd - rep.min_sigma},
                         {"expected_pd", rep.expected_pd},
                         {"expected_sigma", rep.expected_sigma},
                         {"max_error", rep.max_error},
                         {"pass", rep.pass != 0}});
      all_pass = all_pass && rep.pass;
      std::cout << "h=" << h.p << "/" << h.q << ": " << (rep.pass ? "pass" : "FAIL") << ", min_pd "
                << fmt(rep.min_pd) << ", min_sigma " << fmt(rep.min_sigma) << ", gap " << fmt(rep.min_pd - rep.min_sigma)
                << ", max endpoint error " << fmt(rep.max_error) << "\n";
    });
  }
  run.add("disc.csv", csv);
  run.add_json("disc.json", {{"potential", semispec_potential_name(pot.get())}, {"reports", reports}});
  return all_pass ? 0 : kExitNumeric;
}

int cmd_hausdorff(Run& run, const RunConfig& c) {
  if (!c.h.empty() || !c.q_range.empty() || !c.h_range.empty())
    config_error("hausdorff takes its denominator from --den");
  const long den = c.den > 0 ? c.den : 50;
  const auto pot = load(c.potential);
  const semispec_options o = options_of(c);
  semispec_hoelder_summary s;
  TablePtr table = run.stage("hoelder", [&] {
    semispec_table* t = nullptr;
    check(semispec_hoelder(pot.get(), den, &o, &s, &t));
    return TablePtr(t);
  });
  std::cout << "r(p) over p/" << den << ": max " << fmt(s.max) << ", median " << fmt(s.median) << ", max/median "
            << fmt(s.max / s.median) << (s.flagged ? " (flagged)" : "") << "\n";
  run.add("hausdorff.csv", csv_of(table));
  run.add_json("hausdorff.json", {{"potential", semispec_potential_name(pot.get())},
                                  {"q", den},
                                  {"max", s.max},
                                  {"median", s.median},
                                  {"max_over_median", s.median > 0.0 ? json(s.max / s.median) : json(nullptr)},
                                  {"flagged", s.flagged != 0}});
  return 0;
}

int cmd_scaling(Run& run, const RunConfig& c) {
  std::vector<double> fallback(10);
  check(semispec_geometric_grid(0.01, 0.1, 10, fallback.data()));
  const auto hs = real_hs(c, fallback);
  const auto pot = load(c.potential);
  const semispec_options o = options_of(c);
  TablePtr all;
  json fits = json::object(), checks = json::array();
  for (const auto k : kinetics_of(c.kinetic)) {
    run.stage(std::string("scaling_") + kinetic_name(k), [&] {
      semispec_fit f;
      semispec_table* t = nullptr;
      check(semispec_scaling(pot.get(), k, hs.data(), hs.size(), &o, &f, &t));
      TablePtr tp(t);
      std::vector<double> y;
      for (std::size_t r = 0; r < hs.size(); ++r) {
        double v = 0.0;
        check(semispec_table_number(tp.get(), r, 4, &v));
        y.push_back(v);
      }
      fits[kinetic_name(k)] = fit_json(f, hs, y);
      std::cout << kinetic_name(k) << ": min_spec_pc ~ h^" << fmt(f.slope) << " (r2 " << fmt(f.r2) << ")\n";
      if (!all) all = std::move(tp);
      else check(semispec_table_append(all.get(), tp.get()));
    });
    if (c.verify_bloch) checks.push_back(verify_bloch(run, pot.get(), k, hs, c));
  }
  run.add("scaling.csv", csv_of(all));
  json doc{{"potential", semispec_potential_name(pot.get())}, {"x", "h"}, {"y", "min_spec_pc"}, {"fits", fits}};
  if (!checks.empty()) doc["checks"] = checks;
  run.add_json("scaling.json", doc);
  return 0;
}

int cmd_bs_vs_spec(Run& run, const RunConfig& c) {
  const auto hs = real_hs(c, {0.1, 0.05, 0.04, 0.02, 0.01});
  const auto pot = load(c.potential);
  const semispec_options o = options_of(c);
  for (const auto k : kinetics_of(c.kinetic)) {
    run.stage(std::string("bs_vs_spec_") + kinetic_name(k), [&] {
      semispec_table* t = nullptr;
      check(semispec_bs_vs_spec(pot.get(), k, hs.data(), hs.size(), &o, &t));
      const TablePtr tp(t);
      run.add(std::string("bs_vs_spec_") + kinetic_name(k) + ".csv", csv_of(tp));
      for (std::size_t r = 0; r < hs.size(); ++r) {
        double d = 0.0;
        check(semispec_table_number(tp.get(), r, 3, &d));
        std::cout << kinetic_name(k) << " h=" << fmt(hs[r]) << ": |E_spec - E_bs| = " << fmt(d) << "\n";
      }
    });
    if (c.verify_bloch && k == SEMISPEC_KINETIC_CONTINUOUS) verify_bloch(run, pot.get(), k, hs, c);
  }
  return 0;
}

// Seeded property checks through the public API.
int cmd_selftest(Run& run, const RunConfig& c) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> qdist(1, 12);
  json results = json::array();
  int total_failures = 0;

  auto record = [&](const std::string& name, int cases, int failures, double worst) {
    results.push_back({{"check", name}, {"cases", cases}, {"failures", failures}, {"max_error", worst}});
    total_failures += failures;
    std::cout << (failures ? "FAIL " : "ok   ") << name << " (" << cases << " cases, max error " << fmt(worst)
              << ")\n";
  };

  auto random_potential = [&] {
    const int bw = 1 + static_cast<int>(unit(rng) * 3.0);
    std::vector<int> betas;
    std::vector<double> re, im;
    betas.push_back(0);
    re.push_back(unit(rng));
    im.push_back(0.0);
    for (int b = 1; b <= bw; ++b) {
      betas.push_back(b);
      re.push_back(unit(rng) - 0.5);
      im.push_back(unit(rng) - 0.5);
    }
    semispec_potential* p = nullptr;
    check(semispec_potential_from_coeffs("random", betas.size(), betas.data(), re.data(), im.data(), 0.0, &p));
    return PotentialPtr(p);
  };

  auto random_rational = [&] {
    const long q = qdist(rng);
    const long p = 1 + static_cast<long>(unit(rng) * static_cast<double>(q));
    const long g = std::gcd(std::min(p, q), q);
    return Rational{std::min(p, q) / g, q / g};
  };

  auto eig = [&](const semispec_potential* pot, Rational h, double t1, double t2) {
    std::vector<double> ev(static_cast<std::size_t>(h.q));
    check(semispec_floquet_eigenvalues(pot, h.p, h.q, t1, t2, ev.data()));
    return ev;
  };
  auto max_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };

  run.stage("floquet", [&] {
    int herm_fail = 0, refl_fail = 0, shift_fail = 0, hull_fail = 0;
    double refl_worst = 0.0, shift_worst = 0.0, hull_worst = -INFINITY;
    const semispec_options o = options_of(c);
    for (int i = 0; i < c.cases; ++i) {
      const auto pot = random_potential();
      const Rational h = random_rational();
      const double t1 = 2 * kPi * unit(rng), t2 = 2 * kPi * unit(rng);
      const std::size_t n = static_cast<std::size_t>(h.q * h.q);
      std::vector<double> re(n), im(n);
      check(semispec_floquet_matrix(pot.get(), h.p, h.q, t1, t2, re.data(), im.data()));
      for (long r = 0; r < h.q; ++r)
        for (long col = 0; col < h.q; ++col)
          if (re[r * h.q + col] != re[col * h.q + r] || im[r * h.q + col] != -im[col * h.q + r]) ++herm_fail;
      const auto base = eig(pot.get(), h, t1, t2);
      const double refl = max_diff(base, eig(pot.get(), h, -t1, t2));
      refl_worst = std::max(refl_worst, refl);
      refl_fail += refl > 1e-10;
      const double shift = 2 * kPi * h.value();
      const double s = std::max(max_diff(base, eig(pot.get(), h, t1 + shift, t2)),
                                max_diff(base, eig(pot.get(), h, t1, t2 + shift)));
      shift_worst = std::max(shift_worst, s);
      shift_fail += s > 1e-10;
      double pd = 0.0, sigma = 0.0;
      check(semispec_min_spec(pot.get(), h.p, h.q, SEMISPEC_MODE_PD, &o, &pd));
      check(semispec_min_spec(pot.get(), h.p, h.q, SEMISPEC_MODE_SIGMA, &o, &sigma));
      hull_worst = std::max(hull_worst, sigma - pd);
      hull_fail += sigma > pd + c.min_tol;
    }
    record("hermitian", c.cases, herm_fail, 0.0);
    record("theta1_reflection", c.cases, refl_fail, refl_worst);
    record("shift_covariance", c.cases, shift_fail, shift_worst);
    record("hull_below_pd", c.cases, hull_fail, std::max(0.0, hull_worst));
  });

  run.stage("galerkin", [&] {
    int fail = 0;
    double worst = 0.0;
    for (int i = 0; i < c.cases; ++i) {
      const auto pot = random_potential();
      const double h = 0.02 + 0.2 * unit(rng);
      double kappa[2], coarse[2], fine[2];
      check(semispec_bloch_sweep(pot.get(), h, SEMISPEC_KINETIC_CONTINUOUS, 2, 4, kappa, coarse));
      check(semispec_bloch_sweep(pot.get(), h, SEMISPEC_KINETIC_CONTINUOUS, 2, 8, kappa, fine));
      const double excess = fine[0] - coarse[0];
      worst = std::max(worst, excess);
      fail += excess > 1e-12 * std::max(1.0, std::abs(coarse[0]));
    }
    record("galerkin_monotone", c.cases, fail, worst);
  });

  run.stage("hausdorff", [&] {
    int fail = 0;
    double worst = 0.0;
    auto sample = [&] {
      std::vector<double> v(1 + static_cast<std::size_t>(unit(rng) * 6.0));
      for (double& x : v) x = 4.0 * unit(rng) - 2.0;
      return v;
    };
    auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
      double d = 0.0;
      check(semispec_hausdorff(a.data(), a.size(), b.data(), b.size(), &d));
      return d;
    };
    for (int i = 0; i < c.cases; ++i) {
      const auto a = sample(), b = sample(), x = sample();
      const double ab = dist(a, b), ba = dist(b, a), aa = dist(a, a), ax = dist(a, x), xb = dist(x, b);
      const double err = std::max({std::abs(ab - ba), aa, ab - ax - xb, -ab});
      worst = std::max(worst, err);
      fail += err > 1e-15;
    }
    record("hausdorff_metric", c.cases, fail, worst);
  });

  run.stage("harmonic", [&] {
    int fail = 0;
    double worst = 0.0;
    const double a[4] = {1.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < c.cases; ++i) {
      const double h = 0.001 + 0.1 * unit(rng);
      double ec = 0.0, ed = 0.0, dl = 0.0;
      check(semispec_bs_e0(a, SEMISPEC_KINETIC_CONTINUOUS, h, &ec));
      check(semispec_bs_e0(a, SEMISPEC_KINETIC_DISCRETE, h, &ed));
      check(semispec_d_leading(1.0, h, &dl));
      const double err = std::max({std::abs(ec - h), std::abs(ed - (h - h * h / 16.0)), std::abs(ed / ec - dl)});
      worst = std::max(worst, err);
      fail += err > 1e-15;
    }
    record("harmonic_identities", c.cases, fail, worst);
  });

  run.add_json("selftest.json", {{"seed", c.seed}, {"cases", c.cases}, {"failures", total_failures},
                                 {"checks", results}});
  return total_failures ? kExitNumeric : 0;
}

unsigned default_workers_from_env() {
  const char* env = std::getenv("SEMISPEC_WORKERS");
  if (!env || !*env) return 1;
  const long v = parse_long(env, "SEMISPEC_WORKERS");
  if (v < 1) config_error("SEMISPEC_WORKERS must be >= 1");
  return static_cast<unsigned>(v);
}

constexpr const char* kFooter = R"(Files (written to --out, all at the end of a successful run):
  butterfly_<mode>.csv        p,q,h,theta1,theta2,k,lambda   sampled eigenvalues, rows by (q,p,theta,k)
  butterfly_<mode>_bands.csv  p,q,h,band_lo,band_hi           sampled bands merged at gap-tol
  compare.csv                 p,q,h,min_pd,min_sigma,min_pc,d,D,status
                              d = min_pd/min_pc, D = min_sigma/min_pc, status "ok" or "failed: ..."
  fits.json                   slope, intercept, r2, points_used, inputs_digest of log|d-1|, log|D-1| vs log h
  bs.csv                      potential,kinetic,a0,a1,a2,a3,alpha1,alpha2,h,E0,d_leading
  disc.csv                    p,q,mode,source,band_lo,band_hi  computed and closed-form bands
  disc.json                   min_pd, min_sigma, gap, expected values, max_error, pass per h
  hausdorff.csv               p,q,r   r(p) = d_H(Sigma_{p/q}, Sigma_{(p+1)/q}) q^{1/2}
  hausdorff.json              max, median, max_over_median, flagged (max > 10 median)
  scaling.csv                 potential,kinetic,h,N_final,min_eig
  scaling.json                fit of log min_eig vs log h per kinetic
  bs_vs_spec_<kinetic>.csv    h,E_spec,E_bs,abs_diff   E_spec measured from min V
  bloch_<kinetic>.csv         kinetic,h,n_modes,max_excess   (--verify-bloch)
  selftest.json               seed, cases, per-check failures and max_error
  manifest.json               tool, version, command, argv, config, config_file, workers,
                              outputs, stages (name, seconds), wall_time_seconds

Exit codes: 0 ok, 2 configuration or input error, 3 numeric failure or failed check.
Environment: SEMISPEC_WORKERS sets the default worker count.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bottom-of-spectrum comparisons for periodic Schroedinger operators", "semispec"};
  app.footer(kFooter);
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", semispec_version());
  auto* config_opt = app.set_config("--config", "", "flat key = value file; command-line flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig c;
  try {
    c.workers = default_workers_from_env();
  } catch (const CliError& e) {
    std::cerr << "semispec: " << e.message << "\n";
    return e.code;
  }

  app.add_option("--potential", c.potential, "builtin v1..v4 or a potential definition file (bs: comma list)")
      ->capture_default_str();
  app.add_option("--n1", c.n1, "theta1 points per period")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  app.add_option("--n2", c.n2, "theta2 points per period (hull)")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  app.add_option("--coarse", c.coarse, "seed grid of the theta minimization")
      ->check(CLI::Range(2, 1 << 16))
      ->capture_default_str();
  app.add_option("--n-k,--n_k", c.n_k, "Bloch phases for --verify-bloch")
      ->check(CLI::Range(2, 1 << 16))
      ->capture_default_str();
  app.add_option("--min-tol,--min_tol", c.min_tol, "theta refinement tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--hill-tol,--hill_tol", c.hill_tol, "Galerkin doubling tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--gap-tol,--gap_tol", c.gap_tol, "band merge tolerance (default: twice the grid error bound)")
      ->check(CLI::PositiveNumber);
  auto* h_opt = app.add_option("--h", c.h, "explicit h list, p/q or decimal")->delimiter(',');
  auto* den_opt = app.add_option("--den", c.den, "h = p/den for p = 1..den")->check(CLI::PositiveNumber);
  auto* qr_opt = app.add_option("--q-range,--q_range", c.q_range, "h = 1/q for q in lo:hi");
  auto* hr_opt = app.add_option("--h-range,--h_range", c.h_range, "n geometric h values on lo:hi:n");
  app.add_option("--kinetic", c.kinetic, "continuous, discrete or both")
      ->check(CLI::IsMember({"continuous", "discrete", "both"}))
      ->capture_default_str();
  app.add_option("--mode", c.mode, "butterfly: pd, sigma or both")
      ->check(CLI::IsMember({"pd", "sigma", "both"}))
      ->capture_default_str();
  app.add_option("--well", c.well, "bs: Taylor data a0,a1,a2,a3 instead of a potential");
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1u, 4096u))->capture_default_str();
  app.add_flag("--verify-bloch,--verify_bloch", c.verify_bloch, "check that kappa = 0 is the band bottom");
  app.add_option("--seed", c.seed, "selftest: RNG seed")->capture_default_str();
  app.add_option("--cases", c.cases, "selftest: cases per check")->check(CLI::Range(1, 1000000))->capture_default_str();

  using Handler = int (*)(Run&, const RunConfig&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands{
      {"butterfly", "sampled Spec(P_d) and hull slices (default --den 50, --mode both)", cmd_butterfly},
      {"compare", "d(h) and D(h) table with log-log fits (default --q-range 8:128)", cmd_compare},
      {"bs", "Bohr-Sommerfeld action coefficients, optional E0 and d_leading per --h", cmd_bs},
      {"disc", "closed-form band checks for v1, v2 at h = 1/2, 1", cmd_disc},
      {"hausdorff", "Hoelder-1/2 statistic of the hull over p/den (default --den 50)", cmd_hausdorff},
      {"scaling", "exponent of min Spec(P_c(h)) (default 10 geometric h on [0.01, 0.1])", cmd_scaling},
      {"bs-vs-spec", "two-term ground state against the computed spectrum", cmd_bs_vs_spec},
      {"selftest", "seeded property checks (--seed, --cases)", cmd_selftest},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->footer(kFooter);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  std::vector<std::string> args(argv, argv + argc);

  // One h selector; one given on the command line overrides any from the file.
  {
    const std::vector<std::pair<CLI::Option*, std::vector<std::string>>> selectors{
        {h_opt, {"--h"}}, {den_opt, {"--den"}}, {qr_opt, {"--q-range", "--q_range"}}, {hr_opt, {"--h-range", "--h_range"}}};
    auto on_command_line = [&](const std::vector<std::string>& names) {
      for (const auto& a : args)
        for (const auto& n : names)
          if (a == n || a.rfind(n + "=", 0) == 0) return true;
      return false;
    };
    int given = 0, explicit_count = 0;
    for (const auto& [opt, names] : selectors) {
      given += opt->count() > 0;
      explicit_count += on_command_line(names);
    }
    if (explicit_count > 1 || (explicit_count == 0 && given > 1)) {
      std::cerr << "semispec: --h, --den, --q-range and --h-range are mutually exclusive\n";
      return kExitConfig;
    }
    if (explicit_count == 1) {
      for (const auto& [opt, names] : selectors) {
        if (on_command_line(names)) continue;
        if (opt == h_opt) c.h.clear();
        if (opt == den_opt) c.den = 0;
        if (opt == qr_opt) c.q_range.clear();
        if (opt == hr_opt) c.h_range.clear();
      }
    }
  }
  const std::string config_file = config_opt->count() ? config_opt->as<std::string>() : std::string();
  const std::string echo = app.config_to_str(true, false);

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    const auto& [name, help, fn] = commands[i];
    try {
      Run run(name);
      const int code = fn(run, c);
      run.commit(c, echo, config_file, args);
      return code;
    } catch (const CliError& e) {
      std::cerr << "semispec " << name << ": " << e.message << "\n";
      return e.code;
    }
  }
  return kExitConfig;
}
