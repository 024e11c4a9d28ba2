#pragma once

#include <initializer_list>
#include <vector>

namespace semispec {

/// Formal power series sum_k c_k y^k truncated at a fixed degree. Every
/// operation truncates its result to the smaller degree of its operands.
class PowerSeries {
 public:
  explicit PowerSeries(int degree);
  PowerSeries(int degree, std::initializer_list<double> coeffs);
  PowerSeries(int degree, const std::vector<double>& coeffs);

  static PowerSeries constant(int degree, double c);
  static PowerSeries variable(int degree);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return k <= degree() ? c_[static_cast<std::size_t>(k)] : 0.0; }
  double& operator[](int k) { return c_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& coeffs() const { return c_; }

  PowerSeries operator+(const PowerSeries& o) const;
  PowerSeries operator-(const PowerSeries& o) const;
  PowerSeries operator*(const PowerSeries& o) const;
  PowerSeries operator*(double s) const;

  /// this(inner(y)); inner must have zero constant term.
  PowerSeries compose(const PowerSeries& inner) const;

  PowerSeries derivative() const;

  /// 1 / this; the constant term must be nonzero.
  PowerSeries reciprocal() const;

  /// this / y; the constant term must be zero. Degree drops by one.
  PowerSeries divide_by_y() const;

  double evaluate(double y) const;

 private:
  std::vector<double> c_;
};

}  // namespace semispec
