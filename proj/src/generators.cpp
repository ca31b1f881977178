#include "redmat/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace redmat {

const char* to_string(Family family)
{
    switch (family) {
    case Family::cylinder: return "cylinder";
    case Family::mero: return "mero";
    case Family::hypar: return "hypar";
    }
    return "?";
}

Family parse_family(const std::string& name)
{
    if (name == "cylinder") return Family::cylinder;
    if (name == "mero") return Family::mero;
    if (name == "hypar") return Family::hypar;
    throw GeneratorError("unknown family '" + name + "' (expected cylinder, mero or hypar)");
}

namespace {

class Builder {
public:
    explicit Builder(StructuralModel& model) : model_(model) {}

    int node(double x, double y, double z)
    {
        const int id = static_cast<int>(model_.nodes.size()) + 1;
        model_.nodes.push_back({id, {x, y, z}});
        return id;
    }

    void member(int a, int b, ElementKind kind, const MaterialSection& section)
    {
        Element e;
        e.id = static_cast<int>(model_.elements.size()) + 1;
        e.kind = kind;
        e.node_ids = {a, b};
        e.material = section;
        model_.elements.push_back(e);
    }

    void fix(int node_id, int dofs) { model_.supports.push_back({node_id, std::vector<bool>(dofs, true)}); }

private:
    StructuralModel& model_;
};

void require_n(const GeneratorSpec& spec, int minimum)
{
    if (spec.n < minimum) {
        std::ostringstream os;
        os << to_string(spec.family) << " needs n >= " << minimum << ", got " << spec.n;
        throw GeneratorError(os.str());
    }
}

// Skip-one chords k -> k+2 of one ring that coincide neither with ring
// bars nor with each other.
int chords_per_ring(int n) { return n >= 5 ? n : (n == 4 ? 2 : 0); }

} // namespace

int cylinder_bracing_capacity(int n) { return n * n + n * chords_per_ring(n); }

StructuralModel gen_cylinder(const GeneratorSpec& spec)
{
    require_n(spec, 3);
    const int n = spec.n;
    const double determinate_modes = 3.0 * n * n;

    // Every extra member adds one redundant mode to the determinate base.
    const double target = spec.alpha_target;
    if (!(target > 0.0) || !(target < 1.0)) {
        std::ostringstream os;
        os << "unreachable alpha target " << target << " for n = " << n;
        throw GeneratorError(os.str());
    }
    const int capacity = cylinder_bracing_capacity(n);
    const int extra = std::min(capacity, static_cast<int>(std::lround(target * determinate_modes / (1.0 - target))));
    const double achieved = extra / (determinate_modes + extra);
    if (std::abs(achieved - target) > 0.02) {
        std::ostringstream os;
        os << "unreachable alpha target " << target << " for n = " << n << " (range 0 .. "
           << capacity / (determinate_modes + capacity) << ")";
        throw GeneratorError(os.str());
    }

    StructuralModel model;
    Builder b(model);
    auto id = [n](int ring, int k) { return ring * n + ((k % n) + n) % n + 1; };
    for (int ring = 0; ring <= n; ++ring) {
        const double z = spec.height * ring / n;
        for (int k = 0; k < n; ++k) {
            const double t = 2.0 * std::numbers::pi * k / n;
            b.node(spec.radius * std::cos(t), spec.radius * std::sin(t), z);
        }
    }
    for (int k = 0; k < n; ++k) b.fix(id(0, k), 3);

    const auto& sec = spec.truss_section;
    for (int ring = 1; ring <= n; ++ring) {
        for (int k = 0; k < n; ++k) b.member(id(ring, k), id(ring, k + 1), ElementKind::truss, sec);
        for (int k = 0; k < n; ++k) b.member(id(ring - 1, k), id(ring, k), ElementKind::truss, sec);
        for (int k = 0; k < n; ++k) b.member(id(ring - 1, k), id(ring, k + 1), ElementKind::truss, sec);
    }

    int remaining = extra;
    for (int ring = 1; ring <= n && remaining > 0; ++ring)
        for (int k = 0; k < n && remaining > 0; ++k, --remaining)
            b.member(id(ring - 1, k + 1), id(ring, k), ElementKind::truss, sec);
    const int chords = chords_per_ring(n);
    for (int ring = 1; ring <= n && remaining > 0; ++ring)
        for (int k = 0; k < chords && remaining > 0; ++k, --remaining)
            b.member(id(ring, k), id(ring, k + 2), ElementKind::truss, sec);
    return model;
}

StructuralModel gen_mero(const GeneratorSpec& spec)
{
    require_n(spec, 2);
    const int n = spec.n;
    const double width = n * spec.cell;
    const double crown = spec.sag_ratio * width;
    auto z_top = [&](double x, double y) {
        const double u = 2.0 * x / width - 1.0;
        const double v = 2.0 * y / width - 1.0;
        return crown * (1.0 - (u * u + v * v) / 2.0);
    };

    StructuralModel model;
    Builder b(model);
    auto top = [n](int i, int j) { return j * (n + 1) + i + 1; };
    auto bottom = [n](int i, int j) { return (n + 1) * (n + 1) + j * n + i + 1; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const double x = i * spec.cell, y = j * spec.cell;
            b.node(x, y, z_top(x, y));
        }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = (i + 0.5) * spec.cell, y = (j + 0.5) * spec.cell;
            b.node(x, y, z_top(x, y) - spec.layer_offset);
        }

    const auto& sec = spec.truss_section;
    constexpr auto truss = ElementKind::truss;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) b.member(top(i, j), top(i + 1, j), truss, sec);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < n; ++j) b.member(top(i, j), top(i, j + 1), truss, sec);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + 1 < n; ++i) b.member(bottom(i, j), bottom(i + 1, j), truss, sec);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j + 1 < n; ++j) b.member(bottom(i, j), bottom(i, j + 1), truss, sec);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            b.member(bottom(i, j), top(i, j), truss, sec);
            b.member(bottom(i, j), top(i + 1, j), truss, sec);
            b.member(bottom(i, j), top(i, j + 1), truss, sec);
            b.member(bottom(i, j), top(i + 1, j + 1), truss, sec);
        }

    for (int node : {bottom(0, 0), bottom(n - 1, 0), bottom(0, n - 1), bottom(n - 1, n - 1)}) b.fix(node, 3);
    return model;
}

StructuralModel gen_hypar_frame(const GeneratorSpec& spec)
{
    require_n(spec, 2);
    const int n = spec.n;
    const double width = n * spec.cell;
    const double kappa = 4.0 * spec.rise_ratio / width;

    StructuralModel model;
    Builder b(model);
    auto id = [n](int i, int j) { return j * (n + 1) + i + 1; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const double x = i * spec.cell - width / 2.0;
            const double y = j * spec.cell - width / 2.0;
            b.node(x, y, kappa * x * y);
        }

    const auto& sec = spec.beam_section;
    constexpr auto beam = ElementKind::beam3d;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) b.member(id(i, j), id(i + 1, j), beam, sec);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < n; ++j) b.member(id(i, j), id(i, j + 1), beam, sec);

    // Clamped edges i = 0 and j = 0.
    for (int j = 0; j <= n; ++j) b.fix(id(0, j), 6);
    for (int i = 1; i <= n; ++i) b.fix(id(i, 0), 6);
    return model;
}

StructuralModel generate(const GeneratorSpec& spec)
{
    switch (spec.family) {
    case Family::cylinder: return gen_cylinder(spec);
    case Family::mero: return gen_mero(spec);
    case Family::hypar: return gen_hypar_frame(spec);
    }
    throw GeneratorError("unknown family");
}

StructuralModel apply_stiffness_jitter(StructuralModel model, std::uint64_t seed, double spread)
{
    if (!(spread >= 0.0) || !(spread < 1.0)) throw GeneratorError("jitter spread must lie in [0, 1)");
    std::mt19937_64 rng(seed);
    for (auto& e : model.elements) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double factor = 1.0 + spread * (2.0 * u - 1.0);
        e.material.E *= factor;
        e.material.G *= factor;
    }
    return model;
}

} // namespace redmat
