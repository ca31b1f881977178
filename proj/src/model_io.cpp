#include "redmat/model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace redmat {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where)
{
    if (!obj.is_object()) throw ModelFormatError(where + ": expected an object");
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ModelFormatError(where + ": unknown key '" + key + "'");
}

const json& field(const json& obj, const char* key, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end()) throw ModelFormatError(where + ": missing key '" + key + "'");
    return *it;
}

double number(const json& obj, const char* key, const std::string& where)
{
    const auto& v = field(obj, key, where);
    if (!v.is_number()) throw ModelFormatError(where + ": key '" + key + "' must be a number");
    return v.get<double>();
}

int integer(const json& obj, const char* key, const std::string& where)
{
    const auto& v = field(obj, key, where);
    if (!v.is_number_integer()) throw ModelFormatError(where + ": key '" + key + "' must be an integer");
    return v.get<int>();
}

Eigen::Vector3d vec3(const json& v, const std::string& where)
{
    if (!v.is_array() || v.size() != 3)
        throw ModelFormatError(where + ": expected an array of 3 numbers");
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) throw ModelFormatError(where + ": expected an array of 3 numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

const json& array_field(const json& root, const char* key)
{
    const auto& v = field(root, key, "model");
    if (!v.is_array()) throw ModelFormatError(std::string("model: key '") + key + "' must be an array");
    return v;
}

} // namespace

StructuralModel parse_model(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelFormatError(std::string("model: invalid JSON: ") + e.what());
    }
    reject_unknown(root, {"format_version", "nodes", "elements", "supports"}, "model");
    if (root.contains("format_version")) {
        const auto& v = root["format_version"];
        if (!v.is_number_integer() || v.get<int>() != kModelFormatVersion)
            throw ModelFormatError("model: unsupported format_version");
    }

    StructuralModel model;
    for (const auto& jn : array_field(root, "nodes")) {
        reject_unknown(jn, {"id", "x", "y", "z"}, "node");
        const std::string where = "node " + (jn.contains("id") ? jn["id"].dump() : std::string("?"));
        Node node;
        node.id = integer(jn, "id", where);
        node.position = {number(jn, "x", where), number(jn, "y", where), number(jn, "z", where)};
        model.nodes.push_back(node);
    }

    for (const auto& je : array_field(root, "elements")) {
        reject_unknown(je, {"id", "kind", "nodes", "E", "A", "G", "J", "Iyy", "Izz", "orientation_ref"},
                       "element");
        const std::string where = "element " + (je.contains("id") ? je["id"].dump() : std::string("?"));
        Element e;
        e.id = integer(je, "id", where);
        const auto& kind = field(je, "kind", where);
        if (kind == "truss")
            e.kind = ElementKind::truss;
        else if (kind == "beam3d")
            e.kind = ElementKind::beam3d;
        else
            throw ModelFormatError(where + ": key 'kind' must be \"truss\" or \"beam3d\"");

        const auto& nodes = field(je, "nodes", where);
        if (!nodes.is_array() || nodes.size() != 2 || !nodes[0].is_number_integer() ||
            !nodes[1].is_number_integer())
            throw ModelFormatError(where + ": key 'nodes' must be two integer node ids");
        e.node_ids = {nodes[0].get<int>(), nodes[1].get<int>()};

        e.material.E = number(je, "E", where);
        e.material.A = number(je, "A", where);
        if (e.kind == ElementKind::beam3d) {
            e.material.G = number(je, "G", where);
            e.material.J = number(je, "J", where);
            e.material.Iyy = number(je, "Iyy", where);
            e.material.Izz = number(je, "Izz", where);
            if (je.contains("orientation_ref"))
                e.orientation_ref = vec3(je["orientation_ref"], where + " orientation_ref");
        } else {
            for (const char* key : {"G", "J", "Iyy", "Izz", "orientation_ref"})
                if (je.contains(key))
                    throw ModelFormatError(where + ": key '" + key + "' is only valid for beam3d");
        }
        model.elements.push_back(e);
    }

    for (const auto& js : array_field(root, "supports")) {
        reject_unknown(js, {"node", "fixed"}, "support");
        Support s;
        s.node_id = integer(js, "node", "support");
        const auto& fixed = field(js, "fixed", "support");
        if (!fixed.is_array()) throw ModelFormatError("support: key 'fixed' must be an array of booleans");
        for (const auto& f : fixed) {
            if (!f.is_boolean()) throw ModelFormatError("support: key 'fixed' must be an array of booleans");
            s.fixed_mask.push_back(f.get<bool>());
        }
        model.supports.push_back(s);
    }
    return model;
}

std::string dump_model(const StructuralModel& model)
{
    json root;
    root["format_version"] = kModelFormatVersion;
    json nodes = json::array();
    for (const auto& n : model.nodes)
        nodes.push_back({{"id", n.id}, {"x", n.position.x()}, {"y", n.position.y()}, {"z", n.position.z()}});
    json elements = json::array();
    for (const auto& e : model.elements) {
        json je = {{"id", e.id},
                   {"kind", to_string(e.kind)},
                   {"nodes", {e.node_ids[0], e.node_ids[1]}},
                   {"E", e.material.E},
                   {"A", e.material.A}};
        if (e.kind == ElementKind::beam3d) {
            je["G"] = e.material.G;
            je["J"] = e.material.J;
            je["Iyy"] = e.material.Iyy;
            je["Izz"] = e.material.Izz;
            if (e.orientation_ref) {
                const auto& r = *e.orientation_ref;
                je["orientation_ref"] = {r.x(), r.y(), r.z()};
            }
        }
        elements.push_back(std::move(je));
    }
    json supports = json::array();
    for (const auto& s : model.supports) {
        json fixed = json::array();
        for (bool f : s.fixed_mask) fixed.push_back(f);
        supports.push_back({{"node", s.node_id}, {"fixed", fixed}});
    }
    root["nodes"] = std::move(nodes);
    root["elements"] = std::move(elements);
    root["supports"] = std::move(supports);
    return root.dump(1) + "\n";
}

StructuralModel read_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

void write_model(const StructuralModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << dump_model(model);
    if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

} // namespace redmat
