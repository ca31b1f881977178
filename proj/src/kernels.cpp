#include "redmat/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace redmat::kernels {

int threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int count)
{
#ifdef _OPENMP
    omp_set_num_threads(std::max(count, 1));
#else
    (void)count;
#endif
}

bool openmp_enabled()
{
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

namespace {

constexpr Eigen::Index kTile = 128;

} // namespace

namespace serial {

Eigen::VectorXd row_square_sums(const Eigen::MatrixXd& U)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(U.rows());
    for (Eigen::Index k = 0; k < U.cols(); ++k)
        for (Eigen::Index i = 0; i < U.rows(); ++i) out[i] += U(i, k) * U(i, k);
    return out;
}

Eigen::MatrixXd symmetric_outer(const Eigen::MatrixXd& G)
{
    const Eigen::Index m = G.rows();
    Eigen::MatrixXd S(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = j; i < m; ++i) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < G.cols(); ++k) s += G(i, k) * G(j, k);
            S(i, j) = s;
            S(j, i) = s;
        }
    }
    return S;
}

void scale_rows(Eigen::MatrixXd& M, const Eigen::VectorXd& scale)
{
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, j) *= scale[i];
}

Eigen::VectorXd row_column_dots(const RowMajorSparse& A, const Eigen::MatrixXd& X, Eigen::Index first_row)
{
    Eigen::VectorXd out(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double s = 0.0;
        for (RowMajorSparse::InnerIterator it(A, first_row + j); it; ++it) s += it.value() * X(it.col(), j);
        out[j] = s;
    }
    return out;
}

Eigen::MatrixXd sparse_dense_product(const SparseMatrix& A, const Eigen::MatrixXd& X)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(A.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index c = 0; c < A.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(A, c); it; ++it) out(it.row(), j) += it.value() * X(c, j);
    return out;
}

} // namespace serial

namespace parallel {

Eigen::VectorXd row_square_sums(const Eigen::MatrixXd& U)
{
    const Eigen::Index rows = U.rows();
    const Eigen::Index cols = U.cols();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(rows);
    const Eigen::Index blocks = (rows + kTile - 1) / kTile;
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index begin = b * kTile;
        const Eigen::Index end = std::min(rows, begin + kTile);
        for (Eigen::Index k = 0; k < cols; ++k)
            for (Eigen::Index i = begin; i < end; ++i) out[i] += U(i, k) * U(i, k);
    }
    return out;
}

Eigen::MatrixXd symmetric_outer(const Eigen::MatrixXd& G)
{
    const Eigen::Index m = G.rows();
    Eigen::MatrixXd S(m, m);
    const Eigen::Index tiles = (m + kTile - 1) / kTile;
    const Eigen::Index pairs = tiles * (tiles + 1) / 2;

    // Lower-triangular tile pairs (I >= J), each one GEMM.
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index p = 0; p < pairs; ++p) {
        Eigen::Index I = 0;
        while ((I + 1) * (I + 2) / 2 <= p) ++I;
        const Eigen::Index J = p - I * (I + 1) / 2;
        const Eigen::Index r0 = I * kTile, rn = std::min(kTile, m - r0);
        const Eigen::Index c0 = J * kTile, cn = std::min(kTile, m - c0);
        S.block(r0, c0, rn, cn).noalias() = G.middleRows(r0, rn) * G.middleRows(c0, cn).transpose();
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = (j / kTile) * kTile; i < j; ++i) S(i, j) = S(j, i);
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index p = 0; p < pairs; ++p) {
        Eigen::Index I = 0;
        while ((I + 1) * (I + 2) / 2 <= p) ++I;
        const Eigen::Index J = p - I * (I + 1) / 2;
        if (I == J) continue;
        const Eigen::Index r0 = I * kTile, rn = std::min(kTile, m - r0);
        const Eigen::Index c0 = J * kTile, cn = std::min(kTile, m - c0);
        S.block(c0, r0, cn, rn) = S.block(r0, c0, rn, cn).transpose();
    }
    return S;
}

void scale_rows(Eigen::MatrixXd& M, const Eigen::VectorXd& scale)
{
    const Eigen::Index cols = M.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j) M.col(j).array() *= scale.array();
}

Eigen::VectorXd row_column_dots(const RowMajorSparse& A, const Eigen::MatrixXd& X, Eigen::Index first_row)
{
    const Eigen::Index cols = X.cols();
    Eigen::VectorXd out(cols);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j) {
        double s = 0.0;
        for (RowMajorSparse::InnerIterator it(A, first_row + j); it; ++it) s += it.value() * X(it.col(), j);
        out[j] = s;
    }
    return out;
}

Eigen::MatrixXd sparse_dense_product(const SparseMatrix& A, const Eigen::MatrixXd& X)
{
    Eigen::MatrixXd out(A.rows(), X.cols());
    const Eigen::Index blocks = (X.cols() + kTile - 1) / kTile;
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index c0 = b * kTile;
        const Eigen::Index cn = std::min(kTile, X.cols() - c0);
        out.middleCols(c0, cn).noalias() = A * X.middleCols(c0, cn);
    }
    return out;
}

} // namespace parallel

} // namespace redmat::kernels
