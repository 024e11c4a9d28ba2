#pragma once

#include <Eigen/Dense>

#include <vector>

namespace semispec {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// All eigenvalues of a Hermitian matrix, ascending. Only the lower triangle
/// is read. Throws InvalidArgument on non-finite entries.
std::vector<double> eig_hermitian(const ComplexMatrix& m);
std::vector<double> eig_symmetric(const RealMatrix& m);

double lowest_eigenvalue(const ComplexMatrix& m);
double lowest_eigenvalue(const RealMatrix& m);

/// Doubled real embedding [[Re M, -Im M], [Im M, Re M]]; its spectrum is that
/// of M with every eigenvalue repeated twice.
RealMatrix real_embedding(const ComplexMatrix& m);

}  // namespace semispec
