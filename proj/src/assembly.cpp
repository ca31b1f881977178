#include "redmat/assembly.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>

namespace redmat {

const char* to_string(ModeLabel mode)
{
    switch (mode) {
    case ModeLabel::axial: return "axial";
    case ModeLabel::torsion: return "torsion";
    case ModeLabel::bend_z_anti: return "bend_z_anti";
    case ModeLabel::bend_z_sym: return "bend_z_sym";
    case ModeLabel::bend_y_anti: return "bend_y_anti";
    case ModeLabel::bend_y_sym: return "bend_y_sym";
    }
    return "?";
}

namespace {

double checked_length(const Element& element, const Eigen::Vector3d& from, const Eigen::Vector3d& to)
{
    const double length = (to - from).norm();
    if (!(length > 0.0) || !std::isfinite(length))
        throw ModelError("zero-length element " + std::to_string(element.id));
    return length;
}

} // namespace

Eigen::Matrix3d beam_frame(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                           const std::optional<Eigen::Vector3d>& orientation_ref)
{
    const Eigen::Vector3d e1 = (to - from).normalized();
    Eigen::Vector3d ref;
    if (orientation_ref) {
        ref = orientation_ref->normalized();
        if (!ref.allFinite() || e1.cross(ref).norm() < 1e-6)
            throw ModelError("orientation reference is parallel to the member axis");
    } else {
        ref = Eigen::Vector3d::UnitZ();
        if (e1.cross(ref).norm() < 1e-6) ref = Eigen::Vector3d::UnitY();
    }
    const Eigen::Vector3d e3 = (ref - ref.dot(e1) * e1).normalized();
    const Eigen::Vector3d e2 = e3.cross(e1);

    Eigen::Matrix3d frame;
    frame.row(0) = e1.transpose();
    frame.row(1) = e2.transpose();
    frame.row(2) = e3.transpose();
    return frame;
}

ElementFactors truss_factors(const Element& element, const Eigen::Vector3d& from, const Eigen::Vector3d& to)
{
    const double length = checked_length(element, from, to);
    const Eigen::Vector3d d = (to - from) / length;

    ElementFactors f;
    f.A_e.resize(1, 6);
    f.A_e << -d.transpose(), d.transpose();
    f.C_e_diag.resize(1);
    f.C_e_diag << element.material.E * element.material.A / length;
    f.mode_labels = {ModeLabel::axial};
    return f;
}

ElementFactors beam3d_factors(const Element& element, const Eigen::Vector3d& from, const Eigen::Vector3d& to)
{
    const double L = checked_length(element, from, to);
    std::optional<Eigen::Vector3d> ref = element.orientation_ref;
    if (ref && ref->norm() == 0.0)
        throw ModelError("degenerate orientation_ref in element " + std::to_string(element.id));

    Eigen::Matrix3d frame;
    try {
        frame = beam_frame(from, to, ref);
    } catch (const ModelError&) {
        throw ModelError("degenerate orientation_ref in element " + std::to_string(element.id));
    }
    const Eigen::RowVector3d e1 = frame.row(0);
    const Eigen::RowVector3d e2 = frame.row(1);
    const Eigen::RowVector3d e3 = frame.row(2);

    // Column blocks: t1 (0..2), r1 (3..5), t2 (6..8), r2 (9..11).
    ElementFactors f;
    f.A_e = Eigen::MatrixXd::Zero(6, 12);
    auto block = [&](int mode, int dof_block) { return f.A_e.block<1, 3>(mode, 3 * dof_block); };

    block(0, 0) = -e1;
    block(0, 2) = e1;

    block(1, 1) = -e1;
    block(1, 3) = e1;

    block(2, 0) = 2.0 * e2 / L;
    block(2, 1) = e3;
    block(2, 2) = -2.0 * e2 / L;
    block(2, 3) = e3;

    block(3, 1) = -e3;
    block(3, 3) = e3;

    block(4, 0) = -2.0 * e3 / L;
    block(4, 1) = e2;
    block(4, 2) = 2.0 * e3 / L;
    block(4, 3) = e2;

    block(5, 1) = -e2;
    block(5, 3) = e2;

    const auto& m = element.material;
    f.C_e_diag.resize(6);
    f.C_e_diag << m.E * m.A, m.G * m.J, 3.0 * m.E * m.Izz, m.E * m.Izz, 3.0 * m.E * m.Iyy, m.E * m.Iyy;
    f.C_e_diag /= L;
    f.mode_labels = {ModeLabel::axial,       ModeLabel::torsion,    ModeLabel::bend_z_anti,
                     ModeLabel::bend_z_sym,  ModeLabel::bend_y_anti, ModeLabel::bend_y_sym};
    return f;
}

ElementFactors element_factors(const Element& element, const Eigen::Vector3d& from, const Eigen::Vector3d& to)
{
    return element.kind == ElementKind::truss ? truss_factors(element, from, to)
                                              : beam3d_factors(element, from, to);
}

AssembledSystem assemble(const StructuralModel& model, const DofMap& dofs)
{
    std::unordered_map<int, Eigen::Vector3d> positions;
    for (const auto& node : model.nodes) positions.emplace(node.id, node.position);

    const auto order = elements_by_id(model);
    const auto n_elem = static_cast<long>(order.size());

    std::vector<long> row_offset(order.size() + 1, 0);
    for (std::size_t k = 0; k < order.size(); ++k)
        row_offset[k + 1] = row_offset[k] + load_modes(model.elements[order[k]].kind);

    std::vector<ElementFactors> factors(order.size());
    std::vector<std::string> failures(order.size());

#pragma omp parallel for schedule(static)
    for (long k = 0; k < n_elem; ++k) {
        const Element& e = model.elements[order[k]];
        try {
            factors[k] = element_factors(e, positions.at(e.node_ids[0]), positions.at(e.node_ids[1]));
        } catch (const std::exception& ex) {
            failures[k] = ex.what();
        }
    }
    for (const auto& msg : failures)
        if (!msg.empty()) throw ModelError(msg);

    AssembledSystem sys;
    sys.dof_map = dofs;
    sys.counts = counts(model, dofs);
    const long n_q = row_offset.back();
    sys.C_diag.resize(n_q);
    sys.row_index.resize(n_q);

    std::vector<Eigen::Triplet<double, int>> triplets;
    triplets.reserve(static_cast<std::size_t>(n_q) * 12);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Element& e = model.elements[order[k]];
        const auto& gather = dofs.gather[order[k]];
        const auto& f = factors[k];
        for (long m = 0; m < f.A_e.rows(); ++m) {
            const long row = row_offset[k] + m;
            sys.C_diag[row] = f.C_e_diag[m];
            sys.row_index[row] = {e.id, f.mode_labels[m]};
            for (long c = 0; c < f.A_e.cols(); ++c) {
                const int col = gather[c];
                if (col != kFixedDof && f.A_e(m, c) != 0.0)
                    triplets.emplace_back(static_cast<int>(row), col, f.A_e(m, c));
            }
        }
    }
    sys.A.resize(static_cast<int>(n_q), dofs.n);
    sys.A.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

AssembledSystem assemble(const StructuralModel& model)
{
    return assemble(model, build_dof_map(model));
}

SparseMatrix assemble_stiffness(const AssembledSystem& sys)
{
    const SparseMatrix CA = sys.C_diag.asDiagonal() * sys.A;
    SparseMatrix K = SparseMatrix(sys.A.transpose()) * CA;
    return K;
}

} // namespace redmat
