#pragma once

#include "redmat/model.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace redmat {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Load-carrying modes. Beam modes appear in this order in every element.
enum class ModeLabel { axial, torsion, bend_z_anti, bend_z_sym, bend_y_anti, bend_y_sym };

const char* to_string(ModeLabel mode);

/// Generalized strain map and diagonal stiffness of one element, so that
/// K_e = A_e^T diag(C_e) A_e.
struct ElementFactors {
    Eigen::MatrixXd A_e;      // n_m x n_dof_e; columns follow the gather order (t1[, r1], t2[, r2])
    Eigen::VectorXd C_e_diag; // n_m, strictly positive
    std::vector<ModeLabel> mode_labels;
};

/// Principal-axis frame of a beam: rows are e1 (axis), e2, e3.
///
/// The reference vector is orthogonalized against the axis to give e3 and
/// e2 = e3 x e1. Without a reference (0,0,1) is used, or (0,1,0) when the
/// member is within 1e-6 of vertical.
Eigen::Matrix3d beam_frame(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                           const std::optional<Eigen::Vector3d>& orientation_ref);

/// Throws ModelError on a zero-length element.
ElementFactors truss_factors(const Element& element, const Eigen::Vector3d& from, const Eigen::Vector3d& to);

/// Throws ModelError on zero length or an orientation reference parallel to the axis.
ElementFactors beam3d_factors(const Element& element, const Eigen::Vector3d& from, const Eigen::Vector3d& to);

ElementFactors element_factors(const Element& element, const Eigen::Vector3d& from, const Eigen::Vector3d& to);

struct RowTag {
    int element_id = 0;
    ModeLabel mode = ModeLabel::axial;
    bool operator==(const RowTag&) const = default;
};

struct AssembledSystem {
    SparseMatrix A;           // n_q x n, restricted to free DOFs
    Eigen::VectorXd C_diag;   // n_q
    DofMap dof_map;
    ModelCounts counts;
    std::vector<RowTag> row_index; // provenance per row of A
};

/// Rows are ordered by element id, then mode. Members whose nodes are both
/// fixed keep their (all-zero) rows. Element factors are computed in
/// parallel; the output does not depend on the thread count.
AssembledSystem assemble(const StructuralModel& model, const DofMap& dofs);

/// Validates, numbers and assembles in one call.
AssembledSystem assemble(const StructuralModel& model);

/// K = A^T C A.
SparseMatrix assemble_stiffness(const AssembledSystem& sys);

} // namespace redmat
