#pragma once

#include "redmat/assembly.hpp"

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace redmat {

/// The structure has a mechanism: rank(A) < n.
class KinematicallyIndeterminate : public std::runtime_error {
public:
    explicit KinematicallyIndeterminate(int defect);
    /// n - rank(A); -1 when only a failed factorization is known.
    int defect() const noexcept { return defect_; }

private:
    int defect_;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Method { canonical, efficient };
enum class Payload { full, diagonal };
/// How the kernel basis is extracted from C^1/2 A.
enum class KernelMethod { sparse_qr, dense_svd };

const char* to_string(Method method);
const char* to_string(Payload payload);
const char* to_string(KernelMethod method);

struct RedundancyOptions {
    KernelMethod kernel = KernelMethod::sparse_qr;
    /// Relative rank threshold. A pivot (or singular value) counts as zero
    /// below tolerance * largest; default max(n_q, n) * machine epsilon.
    std::optional<double> rank_tolerance;
    /// Right-hand sides per solve block on the canonical path.
    Eigen::Index block_columns = 256;
};

double default_rank_tolerance(const AssembledSystem& sys);

struct RankReport {
    int rank = 0;
    double threshold = 0.0; // absolute
    double largest = 0.0;   // largest pivot or singular value
};

/// Numerical rank of C^1/2 A. Never throws on rank deficiency.
RankReport numerical_rank(const AssembledSystem& sys, const RedundancyOptions& options = {});

/// Fills n_s and alpha. Throws KinematicallyIndeterminate when rank(A) < n.
ModelCounts rank_and_indeterminacy(const AssembledSystem& sys, const RedundancyOptions& options = {});

/// Orthonormal basis of the left kernel of C^1/2 A (n_q x (n_q - n)).
/// Only its span is meaningful; the particular columns depend on the
/// factorization.
struct KernelBasis {
    Eigen::MatrixXd U_k;
    double rank_tolerance_used = 0.0;
    KernelMethod method = KernelMethod::sparse_qr;
    double wall_time = 0.0;
};

KernelBasis kernel_basis(const AssembledSystem& sys, const RedundancyOptions& options = {});

struct RedundancyResult {
    Payload payload = Payload::diagonal;
    Method method = Method::canonical;
    std::optional<Eigen::MatrixXd> full;  // set for Payload::full
    Eigen::VectorXd diagonal;             // always set
    std::vector<RowTag> rows;
    double trace = 0.0;
    double wall_time = 0.0;               // seconds; efficient results include the kernel extraction
    std::optional<Eigen::MatrixXd> self_stress_factor; // C^1/2 U_k, efficient full path only
};

/// R = I - A K^-1 A^T C with a sparse Cholesky factorization of K.
RedundancyResult redundancy_canonical(const AssembledSystem& sys, const RedundancyOptions& options = {});

/// r_ii = 1 - a_i K^-1 (c_ii a_i)^T, one solve per row of A.
RedundancyResult redundancy_diag_canonical(const AssembledSystem& sys, const RedundancyOptions& options = {});

/// R = C^-1 (C^1/2 U_k)(C^1/2 U_k)^T.
RedundancyResult redundancy_efficient(const AssembledSystem& sys, const KernelBasis& basis);

/// r_ll = sum_k U_k(l,k)^2; never forms the n_q x n_q matrix.
RedundancyResult redundancy_diag_efficient(const AssembledSystem& sys, const KernelBasis& basis);

/// Self-stress matrix C R = (C^1/2 U_k)(C^1/2 U_k)^T, exactly symmetric.
Eigen::MatrixXd self_stress(const AssembledSystem& sys, const KernelBasis& basis);

/// Runs one method end to end (kernel extraction included for efficient).
RedundancyResult compute_redundancy(const AssembledSystem& sys, Payload payload, Method method,
                                    const RedundancyOptions& options = {});

struct PrestrainResponse {
    Eigen::VectorXd e0;
    Eigen::VectorXd e_el; // -R e0
    Eigen::VectorXd s;    // C e_el
    Eigen::VectorXd d;    // displacements from K d = A^T C e0
    double direct_discrepancy = 0.0;   // max |e_el - (A d - e0)|
    double equilibrium_residual = 0.0; // ||A^T s||_2
};

/// Maps a pre-strain through a full redundancy matrix and cross-checks it
/// against a direct displacement solve with zero external load.
PrestrainResponse apply_prestrain(const AssembledSystem& sys, const RedundancyResult& R, const Eigen::VectorXd& e0);

} // namespace redmat
