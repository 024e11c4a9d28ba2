#include "semispec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semispec/error.hpp"
#include "semispec/table.hpp"

namespace semispec {

namespace {

void check_finite(const std::vector<double>& values) {
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorKind::DataCorruption, "spectrum sample contains a non-finite value");
}

double directed(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  std::size_t j = 0;
  for (double x : a) {
    while (j + 1 < b.size() && std::abs(b[j + 1] - x) <= std::abs(b[j] - x)) ++j;
    d = std::max(d, std::abs(b[j] - x));
  }
  return d;
}

double distance_to(const IntervalUnion& u, double x) {
  const auto& iv = u.intervals;
  auto it = std::lower_bound(iv.begin(), iv.end(), x, [](const Interval& i, double v) { return i.hi < v; });
  double d = std::numeric_limits<double>::infinity();
  if (it != iv.end()) d = std::min(d, it->lo <= x ? 0.0 : it->lo - x);
  if (it != iv.begin()) d = std::min(d, x - std::prev(it)->hi);
  return d;
}

double directed(const IntervalUnion& a, const IntervalUnion& b) {
  double d = 0.0;
  for (const auto& i : a.intervals) {
    d = std::max({d, distance_to(b, i.lo), distance_to(b, i.hi)});
    for (std::size_t g = 0; g + 1 < b.intervals.size(); ++g) {
      const double mid = 0.5 * (b.intervals[g].hi + b.intervals[g + 1].lo);
      if (mid > i.lo && mid < i.hi) d = std::max(d, distance_to(b, mid));
    }
  }
  return d;
}

}  // namespace

SpectrumSample::SpectrumSample(std::vector<double> values, SampleMeta meta)
    : values_(std::move(values)), meta_(meta) {
  check_finite(values_);
  std::sort(values_.begin(), values_.end());
}

SpectrumSample::SpectrumSample(std::vector<SampleRow> rows, SampleMeta meta) : rows_(std::move(rows)), meta_(meta) {
  values_.reserve(rows_.size());
  for (const auto& r : rows_) values_.push_back(r.lambda);
  check_finite(values_);
  std::sort(values_.begin(), values_.end());
}

double SpectrumSample::min() const {
  require(!values_.empty(), "empty spectrum sample");
  return values_.front();
}

double SpectrumSample::max() const {
  require(!values_.empty(), "empty spectrum sample");
  return values_.back();
}

bool IntervalUnion::contains(double x) const {
  return std::any_of(intervals.begin(), intervals.end(), [x](const Interval& i) { return i.lo <= x && x <= i.hi; });
}

double IntervalUnion::covered_length() const {
  double sum = 0.0;
  for (const auto& i : intervals) sum += i.length();
  return sum;
}

IntervalUnion merge(const SpectrumSample& sample, double gap_tol) {
  require(gap_tol > 0.0, "merge: gap_tol must be positive");
  require(!sample.empty(), "merge: empty spectrum sample");
  IntervalUnion out;
  out.gap_tol = gap_tol;
  const auto& v = sample.values();
  Interval cur{v.front(), v.front()};
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] - cur.hi <= gap_tol) {
      cur.hi = v[i];
    } else {
      out.intervals.push_back(cur);
      cur = {v[i], v[i]};
    }
  }
  out.intervals.push_back(cur);
  return out;
}

IntervalUnion merge_intervals(std::vector<Interval> intervals, double gap_tol) {
  require(gap_tol >= 0.0, "merge_intervals: gap_tol must be nonnegative");
  require(!intervals.empty(), "merge_intervals: no intervals");
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalUnion out;
  out.gap_tol = gap_tol;
  Interval cur = intervals.front();
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i].lo - cur.hi <= gap_tol) {
      cur.hi = std::max(cur.hi, intervals[i].hi);
    } else {
      out.intervals.push_back(cur);
      cur = intervals[i];
    }
  }
  out.intervals.push_back(cur);
  return out;
}

double hausdorff(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "hausdorff: empty input");
  return std::max(directed(a, b), directed(b, a));
}

double hausdorff(const SpectrumSample& a, const SpectrumSample& b) {
  return hausdorff(std::span<const double>(a.values()), std::span<const double>(b.values()));
}

double hausdorff(const IntervalUnion& a, const IntervalUnion& b) {
  require(!a.intervals.empty() && !b.intervals.empty(), "hausdorff: empty input");
  return std::max(directed(a, b), directed(b, a));
}

Table long_format_table() { return Table({"p", "q", "h", "theta1", "theta2", "k", "lambda"}); }

void append_long_rows(Table& table, const SpectrumSample& sample) {
  const auto& m = sample.meta();
  const double h = m.q == 0 ? 0.0 : static_cast<double>(m.p) / static_cast<double>(m.q);
  for (const auto& r : sample.rows())
    table.add_row({std::int64_t{m.p}, std::int64_t{m.q}, h, r.theta1, r.theta2, std::int64_t{r.k}, r.lambda});
}

Table banded_table() { return Table({"p", "q", "h", "band_lo", "band_hi"}); }

void append_band_rows(Table& table, long p, long q, const IntervalUnion& bands) {
  const double h = static_cast<double>(p) / static_cast<double>(q);
  for (const auto& i : bands.intervals) table.add_row({std::int64_t{p}, std::int64_t{q}, h, i.lo, i.hi});
}

}  // namespace semispec
