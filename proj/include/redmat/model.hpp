#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace redmat {

enum class ElementKind { truss, beam3d };

const char* to_string(ElementKind kind);

struct Node {
    int id = 0;
    Eigen::Vector3d position = Eigen::Vector3d::Zero(); // meters
};

/// Section and material data. G, J, Iyy and Izz are only read for beam3d.
struct MaterialSection {
    double E = 0.0;   // Pa
    double A = 0.0;   // m^2
    double G = 0.0;   // Pa
    double J = 0.0;   // m^4
    double Iyy = 0.0; // m^4
    double Izz = 0.0; // m^4
};

struct Element {
    int id = 0;
    ElementKind kind = ElementKind::truss;
    std::array<int, 2> node_ids{0, 0};
    MaterialSection material;
    std::optional<Eigen::Vector3d> orientation_ref; // beam3d only
};

/// Fixed DOFs of one node in tx, ty, tz, rx, ry, rz order.
///
/// A 3-entry mask constrains translations only. On a node that carries no
/// rotations the rotational entries of a 6-entry mask are ignored.
struct Support {
    int node_id = 0;
    std::vector<bool> fixed_mask;
};

struct StructuralModel {
    std::vector<Node> nodes;
    std::vector<Element> elements;
    std::vector<Support> supports;
};

enum class Severity { error, warning };

struct Issue {
    Severity severity = Severity::error;
    std::string message;
};

struct ValidationReport {
    std::vector<Issue> issues;

    /// True when no error-level issue was found. Warnings do not count.
    bool ok() const;
    std::vector<std::string> errors() const;
    std::vector<std::string> warnings() const;
    bool contains(const std::string& fragment) const;
};

/// Lists every structural defect of the model. Never throws.
ValidationReport validate_model(const StructuralModel& model);

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kFixedDof = -1;

/// Free-DOF numbering. Nodes are visited in ascending id order and their
/// components in tx, ty, tz, rx, ry, rz order; fixed DOFs get kFixedDof.
struct DofMap {
    struct NodeDofs {
        int node_id = 0;
        int arity = 3; // 3 translations, or 6 when any beam3d touches the node
        std::array<int, 6> index{kFixedDof, kFixedDof, kFixedDof, kFixedDof, kFixedDof, kFixedDof};
        bool operator==(const NodeDofs&) const = default;
    };

    std::vector<NodeDofs> nodes;            // sorted by node id
    std::vector<std::vector<int>> gather;   // per element, in model element order
    int n = 0;

    const NodeDofs& node(int node_id) const;
    bool operator==(const DofMap&) const = default;
};

/// Throws ModelError when validate_model reports errors.
DofMap build_dof_map(const StructuralModel& model);

struct ModelCounts {
    int n = 0;   // free DOFs
    int n_n = 0; // nodes
    int n_e = 0; // elements
    int n_q = 0; // load-carrying modes
    std::optional<int> n_s;      // filled by the rank check
    std::optional<double> alpha; // n_s / n_q
};

int load_modes(ElementKind kind);

ModelCounts counts(const StructuralModel& model, const DofMap& dofs);

double element_length(const StructuralModel& model, const Element& element);

/// Indices into model.elements sorted by element id.
std::vector<std::size_t> elements_by_id(const StructuralModel& model);

/// Returns a copy with lengths expressed in millimetres instead of metres
/// (moduli in N/mm^2, areas in mm^2, inertias in mm^4).
StructuralModel rescale_to_millimetres(const StructuralModel& model);

} // namespace redmat
