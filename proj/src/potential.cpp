#include "semispec/potential.hpp"

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "semispec/error.hpp"

namespace semispec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPairTol = 1e-12;
constexpr double kRealnessTol = 1e-10;

// The FFTW planner is not re-entrant; plan execution is.
std::mutex g_fftw_mutex;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

Potential::Potential(std::string name, const CoeffMap& coeffs, double truncation_tol)
    : name_(std::move(name)), truncation_tol_(truncation_tol) {
  require(truncation_tol >= 0.0, "truncation_tol must be nonnegative");
  for (const auto& [beta, w] : coeffs) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      fail(ErrorKind::DataCorruption, "potential '" + name_ + "': non-finite coefficient at beta=" + std::to_string(beta));
    if (beta < 0) continue;
    if (beta == 0) {
      if (std::abs(w.imag()) > kPairTol * std::max(1.0, std::abs(w)))
        fail(ErrorKind::DataCorruption, "potential '" + name_ + "': w_0 is not real");
      if (std::abs(w.real()) >= truncation_tol && w.real() != 0.0) coeffs_[0] = Complex(w.real(), 0.0);
      continue;
    }
    const auto partner = coeffs.find(-beta);
    const Complex wm = partner == coeffs.end() ? Complex{} : partner->second;
    if (std::abs(w - std::conj(wm)) > kPairTol * std::max(1.0, std::abs(w)))
      fail(ErrorKind::DataCorruption, "potential '" + name_ + "': w_{-" + std::to_string(beta) + "} != conj(w_" +
                                          std::to_string(beta) + "), potential is not real");
    const Complex avg = 0.5 * (w + std::conj(wm));
    if (std::abs(avg) < truncation_tol || avg == Complex{}) continue;
    coeffs_[beta] = avg;
    coeffs_[-beta] = std::conj(avg);
  }
  for (const auto& [beta, w] : coeffs) {
    if (beta < 0 && !coeffs.contains(-beta) && std::abs(w) > kPairTol)
      fail(ErrorKind::DataCorruption, "potential '" + name_ + "': w_" + std::to_string(beta) +
                                          " has no conjugate partner, potential is not real");
  }
  terms_.reserve(coeffs_.size());
  for (const auto& [beta, w] : coeffs_) terms_.push_back({beta, w});
}

Complex Potential::coefficient(int beta) const {
  const auto it = coeffs_.find(beta);
  return it == coeffs_.end() ? Complex{} : it->second;
}

int Potential::bandwidth() const {
  if (coeffs_.empty()) return 0;
  return std::max(std::abs(coeffs_.begin()->first), std::abs(coeffs_.rbegin()->first));
}

double Potential::derivative_bound() const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += kTwoPi * std::abs(t.beta) * std::abs(t.w);
  return sum;
}

double Potential::eval(double x, int order) const {
  require(order >= 0 && order <= 8, "derivative order must be in [0, 8]");
  const double xr = x - std::floor(x);
  Complex sum{};
  double scale = 0.0;
  for (const auto& t : terms_) {
    Complex factor = 1.0;
    const Complex k(0.0, kTwoPi * t.beta);
    for (int i = 0; i < order; ++i) factor *= k;
    const Complex term = t.w * factor * std::polar(1.0, kTwoPi * t.beta * xr);
    sum += term;
    scale += std::abs(term);
  }
  if (std::abs(sum.imag()) > kRealnessTol * std::max(1.0, scale))
    fail(ErrorKind::DataCorruption, "potential '" + name_ + "': evaluation has imaginary residue " +
                                        std::to_string(sum.imag()));
  return sum.real();
}

double v4_closed_form(double x) {
  const double s = std::sin(kTwoPi * x);
  if (s == 0.0) return 0.0;
  return std::exp(-1.0 / (s * s));
}

bool is_builtin(std::string_view name) { return name == "v1" || name == "v2" || name == "v3" || name == "v4"; }

Potential builtin(std::string_view name) {
  if (name == "v1") return Potential("v1", {{0, 1.0}, {1, 0.5}, {-1, 0.5}});
  if (name == "v2") return Potential("v2", {{0, 3.0 / 8.0}, {2, 0.25}, {-2, 0.25}, {4, 1.0 / 16.0}, {-4, 1.0 / 16.0}});
  if (name == "v3") {
    const double c0 = 3.0 * std::sqrt(3.0) / 4.0;
    return Potential("v3", {{0, c0}, {1, -0.5}, {-1, -0.5}, {2, Complex(0.0, -0.25)}, {-2, Complex(0.0, 0.25)}});
  }
  if (name == "v4") {
    constexpr double tol = 1e-14;
    return Potential("v4", fourier_coefficients(v4_closed_form, tol), tol);
  }
  fail(ErrorKind::InvalidArgument, "unknown builtin potential '" + std::string(name) + "' (expected v1, v2, v3 or v4)");
}

CoeffMap fourier_coefficients(const std::function<double(double)>& f, double tol) {
  require(tol > 0.0, "fourier_coefficients: tol must be positive");
  constexpr std::size_t kMinNodes = 64;
  constexpr std::size_t kMaxNodes = std::size_t{1} << 20;

  auto transform = [&](std::size_t n) {
    std::vector<double> samples(n);
    for (std::size_t j = 0; j < n; ++j) samples[j] = f(static_cast<double>(j) / static_cast<double>(n));
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan plan;
    {
      std::lock_guard lock(g_fftw_mutex);
      plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), samples.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard lock(g_fftw_mutex);
      fftw_destroy_plan(plan);
    }
    std::vector<Complex> c(n / 2 + 1);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = Complex(out[k][0], out[k][1]) / static_cast<double>(n);
    return c;
  };
  // Largest and summed magnitude over the upper half of the resolved band.
  auto tail = [](const std::vector<Complex>& c) {
    double max = 0.0, mass = 0.0;
    for (std::size_t k = (c.size() - 1) / 2; k < c.size(); ++k) {
      max = std::max(max, std::abs(c[k]));
      mass += std::abs(c[k]);
    }
    return std::pair{max, mass};
  };

  std::size_t n = kMinNodes;
  auto coarse = transform(n);
  while (true) {
    const std::size_t next = 2 * n;
    if (next > kMaxNodes) {
      std::ostringstream msg;
      msg << "fourier_coefficients: no convergence at " << kMaxNodes << " nodes (tail mass " << tail(coarse).second
          << ", tol " << tol << ")";
      fail(ErrorKind::TruncationFailure, msg.str());
    }
    auto fine = transform(next);
    // Two consecutive resolved grids guard against aliasing onto a coarse grid.
    if (tail(coarse).first < tol && tail(fine).first < tol) {
      CoeffMap result;
      for (std::size_t k = 0; k < fine.size(); ++k) {
        if (std::abs(fine[k]) < tol) continue;
        const int beta = static_cast<int>(k);
        if (beta == 0) {
          result[0] = Complex(fine[0].real(), 0.0);
        } else {
          result[beta] = fine[k];
          result[-beta] = std::conj(fine[k]);
        }
      }
      return result;
    }
    n = next;
    coarse = std::move(fine);
  }
}

WellData locate_minimum(const Potential& pot, const MinimumOptions& opts) {
  require(opts.scan_points >= 8, "locate_minimum: scan_points must be >= 8");
  const double step = 1.0 / opts.scan_points;
  int best = 0;
  double best_v = pot.eval(0.0);
  for (int i = 1; i < opts.scan_points; ++i) {
    const double v = pot.eval(i * step);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double center = best * step;
  const double lo = center - step, hi = center + step;

  bool found = false;
  double x = center;
  for (int iter = 0; iter < 200; ++iter) {
    const double d1 = pot.eval(x, 1);
    if (std::abs(d1) < opts.root_tol) {
      found = true;
      break;
    }
    const double d2 = pot.eval(x, 2);
    if (!(d2 > 0.0)) break;
    const double next = x - d1 / d2;
    if (!(next > lo && next < hi)) break;
    if (next == x) break;
    x = next;
  }
  if (found && pot.eval(x) > best_v) found = false;

  if (!found) {
    // Golden-section on V itself inside the bracketing grid cells.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = pot.eval(c), fd = pot.eval(d);
    for (int iter = 0; iter < 200 && b - a > 1e-15; ++iter) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = pot.eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = pot.eval(d);
      }
    }
    x = 0.5 * (a + b);
    if (!std::isfinite(x) || pot.eval(x) > best_v) {
      if (!std::isfinite(best_v))
        fail(ErrorKind::DegenerateWell, "locate_minimum: Newton and golden-section both failed for '" + pot.name() + "'");
      x = center;
    }
  }

  WellData well;
  well.x0 = x - std::floor(x);
  well.v_min = pot.eval(well.x0);
  double factorial = 1.0;
  for (int j = 0; j < 4; ++j) {
    const int order = j + 2;
    factorial *= order;
    well.a[j] = pot.eval(well.x0, order) / factorial;
  }
  well.degenerate = !(well.a[0] >= opts.degenerate_threshold);
  return well;
}

Potential parse_potential(std::string_view text, const std::string& default_name) {
  std::string name = default_name;
  double tol = 0.0;
  CoeffMap coeffs;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    auto where = [&] { return "potential definition line " + std::to_string(lineno) + ": "; };
    if (eq == std::string::npos) fail(ErrorKind::InvalidArgument, where() + "expected 'key = value'");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key == "name") {
      name = value;
      continue;
    }
    if (key == "truncation_tol") {
      try {
        tol = std::stod(value);
      } catch (const std::exception&) {
        fail(ErrorKind::InvalidArgument, where() + "bad truncation_tol '" + value + "'");
      }
      continue;
    }
    int beta = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), beta);
    if (ec != std::errc{} || ptr != key.data() + key.size())
      fail(ErrorKind::InvalidArgument, where() + "unknown key '" + key + "'");
    if (coeffs.contains(beta)) fail(ErrorKind::InvalidArgument, where() + "duplicate frequency " + key);
    Complex w;
    try {
      const auto j = nlohmann::json::parse(value);
      if (j.is_number()) {
        w = Complex(j.get<double>(), 0.0);
      } else if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        w = Complex(j[0].get<double>(), j[1].get<double>());
      } else {
        throw std::invalid_argument("shape");
      }
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, where() + "expected [re, im], got '" + value + "'");
    }
    coeffs[beta] = w;
  }
  CoeffMap completed = coeffs;
  for (const auto& [beta, w] : coeffs)
    if (beta != 0 && !coeffs.contains(-beta)) completed[-beta] = std::conj(w);
  return Potential(name, completed, tol);
}

Potential load_potential(const std::string& spec) {
  if (is_builtin(spec)) return builtin(spec);
  std::ifstream file(spec);
  if (!file) fail(ErrorKind::Io, "cannot open potential file '" + spec + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_potential(buffer.str(), std::filesystem::path(spec).stem().string());
}

}  // namespace semispec
