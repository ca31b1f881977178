#include "redmat/redundancy.hpp"

#include "redmat/kernels.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/SPQRSupport>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

namespace redmat {

KinematicallyIndeterminate::KinematicallyIndeterminate(int defect)
    : std::runtime_error(defect >= 0
                             ? "kinematically indeterminate: rank defect of " + std::to_string(defect) +
                                   " (mechanism present)"
                             : std::string("kinematically indeterminate: stiffness matrix is not positive definite")),
      defect_(defect)
{
}

const char* to_string(Method method) { return method == Method::canonical ? "canonical" : "efficient"; }
const char* to_string(Payload payload) { return payload == Payload::full ? "full" : "diag"; }
const char* to_string(KernelMethod method) { return method == KernelMethod::sparse_qr ? "sparse_qr" : "dense_svd"; }

namespace {

using Clock = std::chrono::steady_clock;
using LongSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, SuiteSparse_long>;
using SparseQr = Eigen::SPQR<LongSparse>;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int dim(Eigen::Index i) { return static_cast<int>(i); }

SparseMatrix scaled_compatibility(const AssembledSystem& sys)
{
    return sys.C_diag.cwiseSqrt().asDiagonal() * sys.A;
}

double relative_tolerance(const AssembledSystem& sys, const RedundancyOptions& options)
{
    return options.rank_tolerance.value_or(default_rank_tolerance(sys));
}

struct QrOutcome {
    std::unique_ptr<SparseQr> qr;
    RankReport rank;
};

QrOutcome factor_sparse_qr(const AssembledSystem& sys, double tau)
{
    const LongSparse B = LongSparse(scaled_compatibility(sys));
    double max_col = 0.0;
    for (Eigen::Index j = 0; j < B.cols(); ++j) max_col = std::max(max_col, B.col(j).norm());

    QrOutcome out;
    out.qr = std::make_unique<SparseQr>();
    out.qr->setPivotThreshold(tau * (max_col > 0.0 ? max_col : 1.0));
    out.qr->compute(B);
    if (out.qr->info() != Eigen::Success) throw KinematicallyIndeterminate(-1);

    const auto spqr_rank = static_cast<Eigen::Index>(out.qr->rank());
    const LongSparse R = out.qr->matrixR();
    const Eigen::Index diag_len = std::min({R.rows(), R.cols(), spqr_rank});
    Eigen::VectorXd pivots(diag_len);
    for (Eigen::Index j = 0; j < diag_len; ++j) pivots[j] = std::abs(R.coeff(j, j));

    out.rank.largest = diag_len > 0 ? pivots.maxCoeff() : 0.0;
    out.rank.threshold = tau * out.rank.largest;
    out.rank.rank = dim((pivots.array() > out.rank.threshold).count());
    return out;
}

struct SvdOutcome {
    Eigen::MatrixXd U;
    RankReport rank;
};

SvdOutcome factor_dense_svd(const AssembledSystem& sys, double tau, bool want_u)
{
    const Eigen::MatrixXd B = Eigen::MatrixXd(scaled_compatibility(sys));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(B, want_u ? Eigen::ComputeFullU : 0);
    const Eigen::VectorXd& sigma = svd.singularValues();

    SvdOutcome out;
    out.rank.largest = sigma.size() > 0 ? sigma.maxCoeff() : 0.0;
    out.rank.threshold = tau * out.rank.largest;
    out.rank.rank = dim((sigma.array() > out.rank.threshold).count());
    if (want_u) out.U = svd.matrixU();
    return out;
}

void require_full_rank(const AssembledSystem& sys, const RankReport& rank)
{
    if (rank.rank < sys.A.cols()) throw KinematicallyIndeterminate(dim(sys.A.cols()) - rank.rank);
}

/// Cholesky factor of K, or KinematicallyIndeterminate with the rank defect.
template <typename Solver>
void factor_stiffness(Solver& llt, const AssembledSystem& sys, const RedundancyOptions& options)
{
    if (sys.A.rows() < sys.A.cols())
        throw KinematicallyIndeterminate(dim(sys.A.cols()) - numerical_rank(sys, options).rank);
    llt.compute(assemble_stiffness(sys));
    if (llt.info() != Eigen::Success) {
        const int defect = dim(sys.A.cols()) - numerical_rank(sys, options).rank;
        throw KinematicallyIndeterminate(defect > 0 ? defect : -1);
    }
}

/// Dense right-hand sides (A^T C)[:, first .. first + count).
Eigen::MatrixXd weighted_rhs_block(const SparseMatrix& At, const Eigen::VectorXd& C, Eigen::Index first,
                                   Eigen::Index count)
{
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(At.rows(), count);
    for (Eigen::Index j = 0; j < count; ++j)
        for (SparseMatrix::InnerIterator it(At, first + j); it; ++it) B(it.row(), j) = it.value() * C[first + j];
    return B;
}

void check_basis(const AssembledSystem& sys, const KernelBasis& basis)
{
    if (basis.U_k.rows() != sys.A.rows())
        throw DimensionMismatch("kernel basis has " + std::to_string(basis.U_k.rows()) + " rows, system has " +
                                std::to_string(sys.A.rows()) + " load modes");
    if (basis.U_k.cols() != sys.A.rows() - sys.A.cols())
        throw DimensionMismatch("kernel basis has " + std::to_string(basis.U_k.cols()) +
                                " columns, expected n_q - n = " + std::to_string(sys.A.rows() - sys.A.cols()));
}

RedundancyResult make_result(const AssembledSystem& sys, Payload payload, Method method)
{
    RedundancyResult r;
    r.payload = payload;
    r.method = method;
    r.rows = sys.row_index;
    return r;
}

} // namespace

double default_rank_tolerance(const AssembledSystem& sys)
{
    const auto size = std::max<Eigen::Index>({sys.A.rows(), sys.A.cols(), 1});
    return static_cast<double>(size) * std::numeric_limits<double>::epsilon();
}

RankReport numerical_rank(const AssembledSystem& sys, const RedundancyOptions& options)
{
    if (sys.A.cols() == 0 || sys.A.rows() == 0) return {};
    const double tau = relative_tolerance(sys, options);
    if (options.kernel == KernelMethod::dense_svd) return factor_dense_svd(sys, tau, false).rank;
    return factor_sparse_qr(sys, tau).rank;
}

ModelCounts rank_and_indeterminacy(const AssembledSystem& sys, const RedundancyOptions& options)
{
    const RankReport rank = numerical_rank(sys, options);
    require_full_rank(sys, rank);
    ModelCounts c = sys.counts;
    c.n_s = c.n_q - c.n;
    c.alpha = c.n_q > 0 ? static_cast<double>(*c.n_s) / c.n_q : 0.0;
    return c;
}

KernelBasis kernel_basis(const AssembledSystem& sys, const RedundancyOptions& options)
{
    const auto start = Clock::now();
    const Eigen::Index n_q = sys.A.rows();
    const Eigen::Index n = sys.A.cols();
    if (n_q < n) throw KinematicallyIndeterminate(dim(n - numerical_rank(sys, options).rank));

    KernelBasis basis;
    basis.method = options.kernel;
    basis.rank_tolerance_used = relative_tolerance(sys, options);
    const Eigen::Index n_s = n_q - n;

    if (n == 0) {
        basis.U_k = Eigen::MatrixXd::Identity(n_q, n_q);
    } else if (options.kernel == KernelMethod::dense_svd) {
        auto svd = factor_dense_svd(sys, basis.rank_tolerance_used, true);
        require_full_rank(sys, svd.rank);
        basis.U_k = svd.U.rightCols(n_s);
    } else {
        auto qr = factor_sparse_qr(sys, basis.rank_tolerance_used);
        require_full_rank(sys, qr.rank);
        if (n_s > 0) {
            Eigen::MatrixXd trailing = Eigen::MatrixXd::Zero(n_q, n_s);
            for (Eigen::Index j = 0; j < n_s; ++j) trailing(n + j, j) = 1.0;
            basis.U_k = qr.qr->matrixQ() * trailing;
        } else {
            basis.U_k.resize(n_q, 0);
        }
    }
    basis.wall_time = seconds_since(start);
    return basis;
}

RedundancyResult redundancy_canonical(const AssembledSystem& sys, const RedundancyOptions& options)
{
    const auto start = Clock::now();
    RedundancyResult result = make_result(sys, Payload::full, Method::canonical);
    const Eigen::Index n_q = sys.A.rows();
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n_q, n_q);

    if (sys.A.cols() > 0) {
        Eigen::CholmodSupernodalLLT<SparseMatrix> llt;
        factor_stiffness(llt, sys, options);
        const SparseMatrix At = sys.A.transpose();
        const Eigen::Index block = std::max<Eigen::Index>(options.block_columns, 1);
        for (Eigen::Index first = 0; first < n_q; first += block) {
            const Eigen::Index count = std::min(block, n_q - first);
            const Eigen::MatrixXd X = llt.solve(weighted_rhs_block(At, sys.C_diag, first, count));
            R.middleCols(first, count) -= kernels::parallel::sparse_dense_product(sys.A, X);
        }
    }

    result.diagonal = R.diagonal();
    result.trace = result.diagonal.sum();
    result.full = std::move(R);
    result.wall_time = seconds_since(start);
    return result;
}

RedundancyResult redundancy_diag_canonical(const AssembledSystem& sys, const RedundancyOptions& options)
{
    const auto start = Clock::now();
    RedundancyResult result = make_result(sys, Payload::diagonal, Method::canonical);
    const Eigen::Index n_q = sys.A.rows();
    result.diagonal = Eigen::VectorXd::Ones(n_q);

    if (sys.A.cols() > 0) {
        Eigen::CholmodSupernodalLLT<SparseMatrix> llt;
        factor_stiffness(llt, sys, options);
        const SparseMatrix At = sys.A.transpose();
        const kernels::RowMajorSparse A_rows = sys.A;
        const Eigen::Index block = std::max<Eigen::Index>(options.block_columns, 1);
        for (Eigen::Index first = 0; first < n_q; first += block) {
            const Eigen::Index count = std::min(block, n_q - first);
            const Eigen::MatrixXd X = llt.solve(weighted_rhs_block(At, sys.C_diag, first, count));
            result.diagonal.segment(first, count) -= kernels::parallel::row_column_dots(A_rows, X, first);
        }
    }

    result.trace = result.diagonal.sum();
    result.wall_time = seconds_since(start);
    return result;
}

RedundancyResult redundancy_efficient(const AssembledSystem& sys, const KernelBasis& basis)
{
    check_basis(sys, basis);
    const auto start = Clock::now();
    RedundancyResult result = make_result(sys, Payload::full, Method::efficient);

    Eigen::MatrixXd G = basis.U_k;
    kernels::parallel::scale_rows(G, sys.C_diag.cwiseSqrt());
    Eigen::MatrixXd R = kernels::parallel::symmetric_outer(G);
    kernels::parallel::scale_rows(R, sys.C_diag.cwiseInverse());

    result.diagonal = R.diagonal();
    result.trace = result.diagonal.sum();
    result.full = std::move(R);
    result.self_stress_factor = std::move(G);
    result.wall_time = basis.wall_time + seconds_since(start);
    return result;
}

RedundancyResult redundancy_diag_efficient(const AssembledSystem& sys, const KernelBasis& basis)
{
    check_basis(sys, basis);
    const auto start = Clock::now();
    RedundancyResult result = make_result(sys, Payload::diagonal, Method::efficient);
    result.diagonal = kernels::parallel::row_square_sums(basis.U_k);
    result.trace = result.diagonal.sum();
    result.wall_time = basis.wall_time + seconds_since(start);
    return result;
}

Eigen::MatrixXd self_stress(const AssembledSystem& sys, const KernelBasis& basis)
{
    check_basis(sys, basis);
    Eigen::MatrixXd G = basis.U_k;
    kernels::parallel::scale_rows(G, sys.C_diag.cwiseSqrt());
    return kernels::parallel::symmetric_outer(G);
}

RedundancyResult compute_redundancy(const AssembledSystem& sys, Payload payload, Method method,
                                    const RedundancyOptions& options)
{
    if (method == Method::canonical)
        return payload == Payload::full ? redundancy_canonical(sys, options)
                                        : redundancy_diag_canonical(sys, options);
    const KernelBasis basis = kernel_basis(sys, options);
    return payload == Payload::full ? redundancy_efficient(sys, basis) : redundancy_diag_efficient(sys, basis);
}

PrestrainResponse apply_prestrain(const AssembledSystem& sys, const RedundancyResult& R, const Eigen::VectorXd& e0)
{
    const Eigen::Index n_q = sys.A.rows();
    if (!R.full) throw DimensionMismatch("apply_prestrain needs a full redundancy matrix");
    if (R.full->rows() != n_q || R.full->cols() != n_q)
        throw DimensionMismatch("redundancy matrix does not match the system");
    if (e0.size() != n_q)
        throw DimensionMismatch("pre-strain has " + std::to_string(e0.size()) + " entries, expected " +
                                std::to_string(n_q));

    PrestrainResponse out;
    out.e0 = e0;
    out.e_el = -(*R.full * e0);
    out.s = sys.C_diag.cwiseProduct(out.e_el);
    out.equilibrium_residual = (sys.A.transpose() * out.s).norm();

    Eigen::VectorXd e_direct = -e0;
    out.d = Eigen::VectorXd::Zero(sys.A.cols());
    if (sys.A.cols() > 0) {
        Eigen::CholmodSupernodalLLT<SparseMatrix> llt;
        factor_stiffness(llt, sys, RedundancyOptions{});
        out.d = llt.solve(Eigen::VectorXd(sys.A.transpose() * sys.C_diag.cwiseProduct(e0)));
        e_direct += sys.A * out.d;
    }
    out.direct_discrepancy = (out.e_el - e_direct).cwiseAbs().maxCoeff();
    return out;
}

} // namespace redmat
