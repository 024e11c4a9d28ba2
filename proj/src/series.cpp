#include "semispec/series.hpp"

#include <algorithm>

#include "semispec/error.hpp"

namespace semispec {

PowerSeries::PowerSeries(int degree) : c_(static_cast<std::size_t>(degree) + 1, 0.0) {
  require(degree >= 0, "PowerSeries: negative degree");
}

PowerSeries::PowerSeries(int degree, std::initializer_list<double> coeffs) : PowerSeries(degree) {
  std::size_t k = 0;
  for (double c : coeffs) {
    if (k > static_cast<std::size_t>(degree)) break;
    c_[k++] = c;
  }
}

PowerSeries::PowerSeries(int degree, const std::vector<double>& coeffs) : PowerSeries(degree) {
  for (std::size_t k = 0; k < coeffs.size() && k < c_.size(); ++k) c_[k] = coeffs[k];
}

PowerSeries PowerSeries::constant(int degree, double c) { return PowerSeries(degree, {c}); }

PowerSeries PowerSeries::variable(int degree) {
  PowerSeries s(degree);
  if (degree >= 1) s.c_[1] = 1.0;
  return s;
}

PowerSeries PowerSeries::operator+(const PowerSeries& o) const {
  PowerSeries r(std::min(degree(), o.degree()));
  for (int k = 0; k <= r.degree(); ++k) r[k] = (*this)[k] + o[k];
  return r;
}

PowerSeries PowerSeries::operator-(const PowerSeries& o) const { return *this + o * -1.0; }

PowerSeries PowerSeries::operator*(const PowerSeries& o) const {
  PowerSeries r(std::min(degree(), o.degree()));
  for (int i = 0; i <= r.degree(); ++i)
    for (int j = 0; i + j <= r.degree(); ++j) r[i + j] += (*this)[i] * o[j];
  return r;
}

PowerSeries PowerSeries::operator*(double s) const {
  PowerSeries r = *this;
  for (double& c : r.c_) c *= s;
  return r;
}

PowerSeries PowerSeries::compose(const PowerSeries& inner) const {
  require(inner[0] == 0.0, "PowerSeries::compose: inner series must vanish at 0");
  const int d = std::min(degree(), inner.degree());
  PowerSeries r = constant(d, (*this)[degree()]);
  for (int k = degree() - 1; k >= 0; --k) r = r * inner + constant(d, (*this)[k]);
  return r;
}

PowerSeries PowerSeries::derivative() const {
  PowerSeries r(std::max(0, degree() - 1));
  for (int k = 1; k <= degree(); ++k) r[k - 1] = k * (*this)[k];
  return r;
}

PowerSeries PowerSeries::reciprocal() const {
  require(c_[0] != 0.0, "PowerSeries::reciprocal: zero constant term");
  PowerSeries r(degree());
  r[0] = 1.0 / c_[0];
  for (int k = 1; k <= degree(); ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += (*this)[j] * r[k - j];
    r[k] = -s / c_[0];
  }
  return r;
}

PowerSeries PowerSeries::divide_by_y() const {
  require(c_[0] == 0.0, "PowerSeries::divide_by_y: nonzero constant term");
  PowerSeries r(std::max(0, degree() - 1));
  for (int k = 1; k <= degree(); ++k) r[k - 1] = (*this)[k];
  return r;
}

double PowerSeries::evaluate(double y) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * y + *it;
  return acc;
}

}  // namespace semispec
