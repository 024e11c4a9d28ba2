#pragma once

#include <span>
#include <vector>

namespace semispec {

class Table;

/// Where a sample came from: the rational h = p/q, the theta grid sizes and
/// the eigensolver tolerance. Zero fields mean "not applicable".
struct SampleMeta {
  long p = 0;
  long q = 0;
  int n1 = 0;
  int n2 = 0;
  double solver_tol = 0.0;
};

/// One eigenvalue with its grid provenance (long-format CSV row).
struct SampleRow {
  double theta1 = 0.0;
  double theta2 = 0.0;
  int k = 0;
  double lambda = 0.0;
};

/// Sorted multiset of eigenvalues. Rows, when present, keep generation order
/// (theta indices, then eigenvalue index) for deterministic output.
class SpectrumSample {
 public:
  SpectrumSample() = default;
  SpectrumSample(std::vector<double> values, SampleMeta meta = {});
  SpectrumSample(std::vector<SampleRow> rows, SampleMeta meta);

  const std::vector<double>& values() const { return values_; }
  const std::vector<SampleRow>& rows() const { return rows_; }
  const SampleMeta& meta() const { return meta_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double min() const;
  double max() const;

 private:
  std::vector<double> values_;
  std::vector<SampleRow> rows_;
  SampleMeta meta_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct IntervalUnion {
  std::vector<Interval> intervals;
  double gap_tol = 0.0;

  bool contains(double x) const;
  double covered_length() const;
};

/// Clusters consecutive sorted samples closer than gap_tol into intervals.
IntervalUnion merge(const SpectrumSample& sample, double gap_tol);

/// Sorts and coalesces intervals whose gap is below gap_tol.
IntervalUnion merge_intervals(std::vector<Interval> intervals, double gap_tol);

/// Hausdorff distance between finite sorted point sets, by a two-pointer sweep.
double hausdorff(std::span<const double> a, std::span<const double> b);
double hausdorff(const SpectrumSample& a, const SpectrumSample& b);

/// Hausdorff distance between finite unions of closed intervals.
double hausdorff(const IntervalUnion& a, const IntervalUnion& b);

/// Long-format CSV schema: p, q, h, theta1, theta2, k, lambda.
Table long_format_table();
void append_long_rows(Table& table, const SpectrumSample& sample);

/// Banded CSV schema: p, q, h, band_lo, band_hi.
Table banded_table();
void append_band_rows(Table& table, long p, long q, const IntervalUnion& bands);

}  // namespace semispec
