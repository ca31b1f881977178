#pragma once

// Dense inner loops of the redundancy computations.
//
// Every kernel exists twice: a plain loop in `serial` that serves as the
// reference in tests, and an OpenMP version in `parallel` used by the
// library. Both take the same arguments and agree to round-off; the
// row-wise reductions agree bit for bit.

#include "redmat/assembly.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace redmat::kernels {

using RowMajorSparse = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Number of threads the parallel kernels use (1 without OpenMP).
int threads();
/// Pins the OpenMP thread count; values < 1 are clamped to 1.
void set_threads(int count);
bool openmp_enabled();

namespace serial {

/// out_i = sum_k U(i,k)^2
Eigen::VectorXd row_square_sums(const Eigen::MatrixXd& U);

/// G G^T, fully populated.
Eigen::MatrixXd symmetric_outer(const Eigen::MatrixXd& G);

/// M <- diag(scale) M
void scale_rows(Eigen::MatrixXd& M, const Eigen::VectorXd& scale);

/// out_j = A.row(first_row + j) . X.col(j)
Eigen::VectorXd row_column_dots(const RowMajorSparse& A, const Eigen::MatrixXd& X, Eigen::Index first_row);

/// A X for sparse A and dense X.
Eigen::MatrixXd sparse_dense_product(const SparseMatrix& A, const Eigen::MatrixXd& X);

} // namespace serial

namespace parallel {

Eigen::VectorXd row_square_sums(const Eigen::MatrixXd& U);
Eigen::MatrixXd symmetric_outer(const Eigen::MatrixXd& G);
void scale_rows(Eigen::MatrixXd& M, const Eigen::VectorXd& scale);
Eigen::VectorXd row_column_dots(const RowMajorSparse& A, const Eigen::MatrixXd& X, Eigen::Index first_row);
Eigen::MatrixXd sparse_dense_product(const SparseMatrix& A, const Eigen::MatrixXd& X);

} // namespace parallel

} // namespace redmat::kernels
