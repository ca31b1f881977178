#pragma once

// Hand-built models and dense reference computations shared by the unit and
// acceptance tests. Nothing here calls the sparse solvers of the library.

#include "redmat/assembly.hpp"
#include "redmat/generators.hpp"
#include "redmat/model.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace redmat::testing {

inline MaterialSection truss_section(double E, double A) { return {E, A, 0.0, 0.0, 0.0, 0.0}; }

inline Element bar(int id, int i, int j, MaterialSection m)
{
    Element e;
    e.id = id;
    e.kind = ElementKind::truss;
    e.node_ids = {i, j};
    e.material = m;
    return e;
}

inline Element beam(int id, int i, int j, MaterialSection m)
{
    Element e = bar(id, i, j, m);
    e.kind = ElementKind::beam3d;
    return e;
}

inline Support fixed(int node, int dofs = 3) { return {node, std::vector<bool>(dofs, true)}; }

/// Two collinear unit bars along x. The middle node moves along x only,
/// so A = [[1],[-1]] and C = diag(k1, k2).
inline StructuralModel two_bar(double k1 = 1.0, double k2 = 1.0)
{
    StructuralModel m;
    m.nodes = {{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {2, 0, 0}}};
    // EA/L with L = 1 and A = 1e-3
    m.elements = {bar(1, 1, 2, truss_section(k1 * 1e3, 1e-3)), bar(2, 2, 3, truss_section(k2 * 1e3, 1e-3))};
    m.supports = {fixed(1), {2, {false, true, true}}, fixed(3)};
    return m;
}

/// Tripod: three fixed base nodes, one free apex. Statically determinate.
inline StructuralModel tripod()
{
    StructuralModel m;
    m.nodes = {{1, {0, 0, 0}}, {2, {2, 0, 0}}, {3, {0.7, 1.8, 0}}, {4, {0.9, 0.6, 1.5}}};
    const auto s = truss_section(210e9, 1e-3);
    m.elements = {bar(1, 1, 4, s), bar(2, 2, 4, s), bar(3, 3, 4, s)};
    m.supports = {fixed(1), fixed(2), fixed(3)};
    return m;
}

/// Cylinder without bracing extras: rings, verticals and one diagonal per
/// cell, which is rigid and statically determinate.
inline StructuralModel determinate_cylinder(int n)
{
    GeneratorSpec spec;
    spec.family = Family::cylinder;
    spec.n = n;
    spec.alpha_target = 0.1;
    StructuralModel m = generate(spec);
    m.elements.resize(3 * n * n);
    return m;
}

/// Hypar frame with one cell: four beam nodes, three of them on the clamped edges.
inline StructuralModel hypar_one_cell()
{
    StructuralModel m;
    const double kappa = 0.8;
    int id = 1;
    for (int j = 0; j <= 1; ++j)
        for (int i = 0; i <= 1; ++i, ++id) m.nodes.push_back({id, {double(i), double(j), kappa * i * j}});
    const MaterialSection s{210e9, 6.5e-3, 81e9, 9.3e-7, 5.7e-5, 2.0e-5};
    m.elements = {beam(1, 1, 2, s), beam(2, 3, 4, s), beam(3, 1, 3, s), beam(4, 2, 4, s)};
    m.supports = {fixed(1, 6), fixed(2, 6), fixed(3, 6)};
    return m;
}

/// Classical 12x12 Euler-Bernoulli stiffness in local axes
/// (u, v, w, thx, thy, thz at each end; v bends about z, w about y).
inline Eigen::Matrix<double, 12, 12> textbook_beam_local(const MaterialSection& s, double L)
{
    Eigen::Matrix<double, 12, 12> k = Eigen::Matrix<double, 12, 12>::Zero();
    const double ea = s.E * s.A / L, gj = s.G * s.J / L;
    const double z12 = 12 * s.E * s.Izz / (L * L * L), z6 = 6 * s.E * s.Izz / (L * L), z4 = 4 * s.E * s.Izz / L,
                 z2 = 2 * s.E * s.Izz / L;
    const double y12 = 12 * s.E * s.Iyy / (L * L * L), y6 = 6 * s.E * s.Iyy / (L * L), y4 = 4 * s.E * s.Iyy / L,
                 y2 = 2 * s.E * s.Iyy / L;
    auto set = [&](int i, int j, double v) { k(i, j) = k(j, i) = v; };

    set(0, 0, ea), set(6, 6, ea), set(0, 6, -ea);
    set(3, 3, gj), set(9, 9, gj), set(3, 9, -gj);

    set(1, 1, z12), set(1, 5, z6), set(1, 7, -z12), set(1, 11, z6);
    set(5, 5, z4), set(5, 7, -z6), set(5, 11, z2);
    set(7, 7, z12), set(7, 11, -z6);
    set(11, 11, z4);

    set(2, 2, y12), set(2, 4, -y6), set(2, 8, -y12), set(2, 10, -y6);
    set(4, 4, y4), set(4, 8, y6), set(4, 10, y2);
    set(8, 8, y12), set(8, 10, y6);
    set(10, 10, y4);
    return k;
}

/// Textbook stiffness rotated to global axes; frame rows are e1, e2, e3.
inline Eigen::Matrix<double, 12, 12> textbook_beam_global(const MaterialSection& s, const Eigen::Matrix3d& frame,
                                                          double L)
{
    Eigen::Matrix<double, 12, 12> T = Eigen::Matrix<double, 12, 12>::Zero();
    for (int b = 0; b < 4; ++b) T.block<3, 3>(3 * b, 3 * b) = frame;
    return T.transpose() * textbook_beam_local(s, L) * T;
}

/// Direct-stiffness assembly of element stiffness matrices into the free DOFs.
inline Eigen::MatrixXd direct_stiffness(const StructuralModel& model, const DofMap& dofs)
{
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dofs.n, dofs.n);
    for (const auto& e : model.elements) {
        const Eigen::Vector3d& a = [&]() -> const Eigen::Vector3d& {
            for (const auto& nd : model.nodes)
                if (nd.id == e.node_ids[0]) return nd.position;
            throw std::logic_error("missing node");
        }();
        const Eigen::Vector3d& b = [&]() -> const Eigen::Vector3d& {
            for (const auto& nd : model.nodes)
                if (nd.id == e.node_ids[1]) return nd.position;
            throw std::logic_error("missing node");
        }();
        const double L = (b - a).norm();
        Eigen::MatrixXd Ke;
        int per_node;
        if (e.kind == ElementKind::truss) {
            const Eigen::Vector3d d = (b - a) / L;
            const Eigen::Matrix3d k = e.material.E * e.material.A / L * d * d.transpose();
            Ke.resize(6, 6);
            Ke << k, -k, -k, k;
            per_node = 3;
        } else {
            Ke = textbook_beam_global(e.material, beam_frame(a, b, e.orientation_ref), L);
            per_node = 6;
        }
        std::vector<int> idx;
        for (int end = 0; end < 2; ++end) {
            const auto& nd = dofs.node(e.node_ids[end]);
            for (int c = 0; c < per_node; ++c) idx.push_back(nd.index[c]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                if (idx[i] >= 0 && idx[j] >= 0) K(idx[i], idx[j]) += Ke(i, j);
    }
    return K;
}

/// R = I - A K^-1 A^T C with dense matrices and a pivoted LU solve.
inline Eigen::MatrixXd dense_redundancy(const AssembledSystem& sys)
{
    const Eigen::MatrixXd A = sys.A;
    const Eigen::Index n_q = A.rows();
    if (A.cols() == 0) return Eigen::MatrixXd::Identity(n_q, n_q);
    const Eigen::MatrixXd AtC = A.transpose() * sys.C_diag.asDiagonal();
    const Eigen::MatrixXd K = AtC * A;
    return Eigen::MatrixXd::Identity(n_q, n_q) - A * K.fullPivLu().solve(AtC);
}

/// Rank of C^1/2 A from a dense SVD.
inline int dense_rank(const AssembledSystem& sys, double rel = 1e-10)
{
    const Eigen::MatrixXd M = sys.C_diag.cwiseSqrt().asDiagonal() * Eigen::MatrixXd(sys.A);
    if (M.cols() == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    return int((s.array() > rel * s(0)).count());
}

inline double max_abs(const Eigen::MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

} // namespace redmat::testing
