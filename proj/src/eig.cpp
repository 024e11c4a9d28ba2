#include "semispec/eig.hpp"

#include "semispec/error.hpp"

namespace semispec {

namespace {

template <class M>
void check_finite(const M& m) {
  require(m.rows() == m.cols(), "eigensolver: matrix is not square");
  if (!m.allFinite()) fail(ErrorKind::InvalidArgument, "eigensolver: non-finite matrix entries");
}

}  // namespace

std::vector<double> eig_hermitian(const ComplexMatrix& m) {
  check_finite(m);
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NonConvergence, "Hermitian eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> eig_symmetric(const RealMatrix& m) {
  check_finite(m);
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NonConvergence, "symmetric eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double lowest_eigenvalue(const ComplexMatrix& m) {
  const auto ev = eig_hermitian(m);
  require(!ev.empty(), "lowest_eigenvalue: empty matrix");
  return ev.front();
}

double lowest_eigenvalue(const RealMatrix& m) {
  const auto ev = eig_symmetric(m);
  require(!ev.empty(), "lowest_eigenvalue: empty matrix");
  return ev.front();
}

RealMatrix real_embedding(const ComplexMatrix& m) {
  const auto n = m.rows();
  RealMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = m.real();
  out.topRightCorner(n, n) = -m.imag();
  out.bottomLeftCorner(n, n) = m.imag();
  out.bottomRightCorner(n, n) = m.real();
  return out;
}

}  // namespace semispec
