#include "redmat/invariants.hpp"

#include "redmat/redundancy.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace redmat {

bool InvariantReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

const InvariantCheck* InvariantReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

double max_abs(const Eigen::MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

std::vector<Eigen::Index> sample(Eigen::Index first, Eigen::Index count, int samples)
{
    std::vector<Eigen::Index> out;
    if (count <= 0) return out;
    const Eigen::Index take = std::min<Eigen::Index>(count, std::max(samples, 1));
    for (Eigen::Index k = 0; k < take; ++k) out.push_back(first + (k * count) / take);
    return out;
}

// Worst relative residual ||M v - lambda W v|| / ||W v|| over sampled
// columns v = C^-1/2 u, with W = C when generalized, else identity.
double eigen_residual(const Eigen::MatrixXd& M, const Eigen::MatrixXd& U, const std::vector<Eigen::Index>& cols,
                      const Eigen::VectorXd& C, double lambda, bool generalized)
{
    double worst = 0.0;
    const Eigen::VectorXd inv_sqrt = C.cwiseSqrt().cwiseInverse();
    for (Eigen::Index l : cols) {
        Eigen::VectorXd v = inv_sqrt.cwiseProduct(U.col(l));
        v /= v.norm();
        const Eigen::VectorXd rhs = generalized ? Eigen::VectorXd(C.cwiseProduct(v)) : v;
        const double scale = lambda != 0.0 ? rhs.norm() : (generalized ? C.maxCoeff() : 1.0);
        worst = std::max(worst, (M * v - lambda * rhs).norm() / scale);
    }
    return worst;
}

} // namespace

InvariantReport run_invariant_suite(const AssembledSystem& sys, const InvariantOptions& options)
{
    InvariantReport report;
    report.counts = rank_and_indeterminacy(sys);
    const int n_s = *report.counts.n_s;
    const Eigen::Index n_q = sys.A.rows();
    const Eigen::Index n = sys.A.cols();
    const double tol = options.tolerance;
    auto add = [&](std::string name, double measured, double tolerance, bool passed) {
        report.checks.push_back({std::move(name), passed, measured, tolerance});
    };
    auto at_most = [&](std::string name, double measured, double tolerance) {
        add(std::move(name), measured, tolerance, measured <= tolerance);
    };

    const KernelBasis basis = kernel_basis(sys);
    const auto canonical = redundancy_canonical(sys);
    const auto efficient = redundancy_efficient(sys, basis);
    const auto diag_canonical = redundancy_diag_canonical(sys);
    const auto diag_efficient = redundancy_diag_efficient(sys, basis);
    const Eigen::MatrixXd& Rc = *canonical.full;
    const Eigen::MatrixXd& Re = *efficient.full;

    report.trace = canonical.trace;
    at_most("trace_canonical", std::abs(canonical.trace - n_s), options.trace_tolerance);
    at_most("trace_efficient", std::abs(efficient.trace - n_s), options.trace_tolerance);
    at_most("trace_diag_efficient", std::abs(diag_efficient.trace - n_s), options.trace_tolerance);
    at_most("oracle_full", max_abs(Re - Rc), tol);
    at_most("oracle_diag", max_abs(diag_efficient.diagonal - diag_canonical.diagonal), tol);
    at_most("diag_matches_full", max_abs(diag_canonical.diagonal - Rc.diagonal()), tol);
    at_most("projector_canonical", max_abs(Rc * Rc - Rc), tol);
    at_most("projector_efficient", max_abs(Re * Re - Re), tol);

    const double lo = std::min(Rc.diagonal().minCoeff(), diag_efficient.diagonal.minCoeff());
    const double hi = std::max(Rc.diagonal().maxCoeff(), diag_efficient.diagonal.maxCoeff());
    add("diagonal_bounds", std::max(-lo, hi - 1.0), tol, lo >= -tol && hi <= 1.0 + tol);

    {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(Re);
        const auto& sigma = svd.singularValues();
        const double cut = options.rank_tau * (sigma.size() ? sigma.maxCoeff() : 0.0);
        const auto rank = (sigma.array() > cut).count();
        add("rank_R", static_cast<double>(rank), static_cast<double>(n_s), rank == n_s);
    }

    const Eigen::MatrixXd CR = self_stress(sys, basis);
    at_most("self_stress_symmetry", max_abs(CR - CR.transpose()), 0.0);
    const Eigen::MatrixXd CRc = sys.C_diag.asDiagonal() * Rc;
    at_most("self_stress_vs_canonical", max_abs(CR - CRc) / std::max(max_abs(CRc), 1e-300), tol);

    const Eigen::MatrixXd UtU = basis.U_k.transpose() * basis.U_k;
    at_most("kernel_orthonormal", max_abs(UtU - Eigen::MatrixXd::Identity(UtU.rows(), UtU.cols())),
            options.orthonormality_tolerance);

    // Full SVD of C^1/2 A supplies the image factor [u_1 .. u_n].
    const Eigen::MatrixXd B = Eigen::MatrixXd(sys.C_diag.cwiseSqrt().asDiagonal() * sys.A);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullU);
    const double sigma_max = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 1.0;
    at_most("kernel_residual", max_abs(B.transpose() * basis.U_k) / sigma_max, tol);

    const Eigen::MatrixXd& U = svd.matrixU();
    const auto image_cols = sample(0, n, options.eigen_samples);
    const auto kernel_cols = sample(n, n_q - n, options.eigen_samples);
    at_most("eigen_kernel_lambda1", std::max(eigen_residual(Rc, U, kernel_cols, sys.C_diag, 1.0, false),
                                             eigen_residual(Re, basis.U_k, sample(0, n_q - n, options.eigen_samples),
                                                            sys.C_diag, 1.0, false)),
            tol);
    at_most("eigen_image_lambda0", eigen_residual(Re, U, image_cols, sys.C_diag, 0.0, false), tol);
    at_most("generalized_eigen_CR", eigen_residual(CR, U, kernel_cols, sys.C_diag, 1.0, true), tol);
    at_most("generalized_eigen_CR_image", eigen_residual(CR, U, image_cols, sys.C_diag, 0.0, true), tol);

    const Eigen::MatrixXd Uim = U.leftCols(n);
    at_most("complement_identity",
            max_abs(Uim * Uim.transpose() + basis.U_k * basis.U_k.transpose() - Eigen::MatrixXd::Identity(n_q, n_q)),
            tol);

    // Deterministic pre-strain: alternating unit strains.
    Eigen::VectorXd e0(n_q);
    for (Eigen::Index i = 0; i < n_q; ++i) e0[i] = (i % 3 == 0) ? 1e-3 : -5e-4 * ((i % 5) + 1);
    const auto response = apply_prestrain(sys, efficient, e0);
    at_most("prestrain_direct_path", response.direct_discrepancy / e0.cwiseAbs().maxCoeff(), tol);
    at_most("prestrain_equilibrium", response.equilibrium_residual / (sys.C_diag.maxCoeff() * e0.norm()), tol);
    return report;
}

InvariantReport run_invariant_suite(const StructuralModel& model, const InvariantOptions& options)
{
    const AssembledSystem sys = assemble(model);
    InvariantReport report = run_invariant_suite(sys, options);
    if (options.unit_invariance) {
        const AssembledSystem mm = assemble(rescale_to_millimetres(model));
        const auto in_m = redundancy_diag_efficient(sys, kernel_basis(sys));
        const auto in_mm = redundancy_diag_efficient(mm, kernel_basis(mm));
        const double diff = (in_m.diagonal - in_mm.diagonal).cwiseAbs().maxCoeff();
        report.checks.push_back({"unit_invariance", diff <= options.tolerance, diff, options.tolerance});
    }
    return report;
}

} // namespace redmat
