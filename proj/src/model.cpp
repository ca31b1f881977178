#include "redmat/model.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace redmat {

const char* to_string(ElementKind kind)
{
    return kind == ElementKind::truss ? "truss" : "beam3d";
}

bool ValidationReport::ok() const
{
    return std::none_of(issues.begin(), issues.end(),
                        [](const Issue& i) { return i.severity == Severity::error; });
}

std::vector<std::string> ValidationReport::errors() const
{
    std::vector<std::string> out;
    for (const auto& i : issues)
        if (i.severity == Severity::error) out.push_back(i.message);
    return out;
}

std::vector<std::string> ValidationReport::warnings() const
{
    std::vector<std::string> out;
    for (const auto& i : issues)
        if (i.severity == Severity::warning) out.push_back(i.message);
    return out;
}

bool ValidationReport::contains(const std::string& fragment) const
{
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) {
        return i.message.find(fragment) != std::string::npos;
    });
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

template <typename... Args>
std::string concat(Args&&... args)
{
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}

} // namespace

ValidationReport validate_model(const StructuralModel& model)
{
    ValidationReport report;
    auto error = [&](std::string msg) { report.issues.push_back({Severity::error, std::move(msg)}); };
    auto warn = [&](std::string msg) { report.issues.push_back({Severity::warning, std::move(msg)}); };

    std::unordered_map<int, const Node*> nodes;
    for (const auto& node : model.nodes) {
        if (!nodes.emplace(node.id, &node).second)
            error(concat("duplicate node id ", node.id));
        if (!node.position.allFinite())
            error(concat("non-finite position at node ", node.id));
    }

    if (model.elements.empty())
        error("model has no elements");

    std::set<int> element_ids;
    std::set<std::tuple<int, int, ElementKind>> connections;
    for (const auto& e : model.elements) {
        if (!element_ids.insert(e.id).second)
            error(concat("duplicate element id ", e.id));

        const auto [a, b] = e.node_ids;
        bool resolved = true;
        for (int nid : e.node_ids) {
            if (!nodes.count(nid)) {
                error(concat("dangling node reference ", nid, " in element ", e.id));
                resolved = false;
            }
        }
        if (a == b) {
            error(concat("element ", e.id, " connects node ", a, " to itself"));
            resolved = false;
        }

        const auto& m = e.material;
        bool props_ok = positive_finite(m.E) && positive_finite(m.A);
        if (e.kind == ElementKind::beam3d)
            props_ok = props_ok && positive_finite(m.G) && positive_finite(m.J) &&
                       positive_finite(m.Iyy) && positive_finite(m.Izz);
        if (!props_ok)
            error(concat("nonpositive section property in element ", e.id));

        if (e.kind == ElementKind::truss && e.orientation_ref)
            warn(concat("orientation_ref ignored on truss element ", e.id));

        if (!resolved) continue;
        const Eigen::Vector3d axis = nodes[b]->position - nodes[a]->position;
        const double length = axis.norm();
        if (!(length > 0.0) || !std::isfinite(length)) {
            error(concat("nonpositive length of element ", e.id));
            continue;
        }
        if (e.kind == ElementKind::beam3d && e.orientation_ref) {
            const Eigen::Vector3d& ref = *e.orientation_ref;
            if (!ref.allFinite() || ref.norm() == 0.0 ||
                axis.normalized().cross(ref.normalized()).norm() < 1e-6)
                error(concat("degenerate orientation_ref in element ", e.id));
        }
        if (!connections.emplace(std::min(a, b), std::max(a, b), e.kind).second)
            warn(concat("duplicate element ", e.id, " between nodes ", a, " and ", b));
    }

    std::set<int> supported;
    bool any_fixed = false;
    for (const auto& s : model.supports) {
        if (!nodes.count(s.node_id))
            error(concat("dangling support reference to node ", s.node_id));
        if (s.fixed_mask.size() != 3 && s.fixed_mask.size() != 6)
            error(concat("support at node ", s.node_id, " needs 3 or 6 fixed flags"));
        if (!supported.insert(s.node_id).second)
            error(concat("duplicate support at node ", s.node_id));
        any_fixed = any_fixed || std::any_of(s.fixed_mask.begin(), s.fixed_mask.end(),
                                             [](bool f) { return f; });
    }
    if (!any_fixed)
        error("unsupported structure: no fixed degree of freedom");

    return report;
}

const DofMap::NodeDofs& DofMap::node(int node_id) const
{
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node_id,
                               [](const NodeDofs& d, int id) { return d.node_id < id; });
    if (it == nodes.end() || it->node_id != node_id)
        throw ModelError(concat("unknown node id ", node_id));
    return *it;
}

DofMap build_dof_map(const StructuralModel& model)
{
    const auto report = validate_model(model);
    if (!report.ok()) {
        std::string msg = "invalid model:";
        for (const auto& e : report.errors()) msg += "\n  " + e;
        throw ModelError(msg);
    }

    std::map<int, DofMap::NodeDofs> by_id;
    for (const auto& node : model.nodes) by_id[node.id].node_id = node.id;
    for (const auto& e : model.elements)
        if (e.kind == ElementKind::beam3d)
            for (int nid : e.node_ids) by_id[nid].arity = 6;

    std::map<int, const Support*> supports;
    for (const auto& s : model.supports) supports[s.node_id] = &s;

    DofMap map;
    map.nodes.reserve(by_id.size());
    int next = 0;
    for (auto& [id, dofs] : by_id) {
        const Support* support = supports.count(id) ? supports[id] : nullptr;
        for (int c = 0; c < dofs.arity; ++c) {
            const bool fixed = support && c < static_cast<int>(support->fixed_mask.size()) &&
                               support->fixed_mask[c];
            dofs.index[c] = fixed ? kFixedDof : next++;
        }
        map.nodes.push_back(dofs);
    }
    map.n = next;

    map.gather.reserve(model.elements.size());
    for (const auto& e : model.elements) {
        const int per_node = e.kind == ElementKind::truss ? 3 : 6;
        std::vector<int> g;
        g.reserve(2 * per_node);
        for (int nid : e.node_ids) {
            const auto& d = map.node(nid);
            for (int c = 0; c < per_node; ++c) g.push_back(d.index[c]);
        }
        map.gather.push_back(std::move(g));
    }
    return map;
}

int load_modes(ElementKind kind) { return kind == ElementKind::truss ? 1 : 6; }

ModelCounts counts(const StructuralModel& model, const DofMap& dofs)
{
    ModelCounts c;
    c.n = dofs.n;
    c.n_n = static_cast<int>(model.nodes.size());
    c.n_e = static_cast<int>(model.elements.size());
    for (const auto& e : model.elements) c.n_q += load_modes(e.kind);
    return c;
}

double element_length(const StructuralModel& model, const Element& element)
{
    const Node* a = nullptr;
    const Node* b = nullptr;
    for (const auto& node : model.nodes) {
        if (node.id == element.node_ids[0]) a = &node;
        if (node.id == element.node_ids[1]) b = &node;
    }
    if (!a || !b) throw ModelError(concat("element ", element.id, " has a dangling node"));
    return (b->position - a->position).norm();
}

std::vector<std::size_t> elements_by_id(const StructuralModel& model)
{
    std::vector<std::size_t> order(model.elements.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return model.elements[i].id < model.elements[j].id;
    });
    return order;
}

StructuralModel rescale_to_millimetres(const StructuralModel& model)
{
    constexpr double mm = 1e3;
    StructuralModel out = model;
    for (auto& node : out.nodes) node.position *= mm;
    for (auto& e : out.elements) {
        auto& m = e.material;
        m.E /= mm * mm;
        m.G /= mm * mm;
        m.A *= mm * mm;
        m.J *= mm * mm * mm * mm;
        m.Iyy *= mm * mm * mm * mm;
        m.Izz *= mm * mm * mm * mm;
    }
    return out;
}

} // namespace redmat
