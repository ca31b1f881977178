#pragma once

#include "redmat/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace redmat {

enum class Family { cylinder, mero, hypar };

const char* to_string(Family family);
Family parse_family(const std::string& name);

/// Bumped whenever node or element numbering of a generator changes.
inline constexpr int kGeneratorVersion = 1;

struct GeneratorSpec {
    Family family = Family::mero;
    int n = 6;
    double alpha_target = 0.1; // cylinder only

    // cylinder
    double radius = 1.0;
    double height = 10.0;

    // mero: square cells with quadratic sag, bottom layer hanging below
    double cell = 1.0;
    double sag_ratio = 0.2;    // crown height / plan width
    double layer_offset = 0.7; // bottom node below the local top surface

    // hypar: z = kappa x y with corner rise = rise_ratio * plan width
    double rise_ratio = 0.2;

    MaterialSection truss_section{210e9, 1e-3, 0.0, 0.0, 0.0, 0.0};
    MaterialSection beam_section{210e9, 6.5e-3, 81e9, 9.3e-7, 5.7e-5, 2.0e-5};
};

class GeneratorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Closed truss cylinder with n rings of n nodes above a fixed base ring.
///
/// One diagonal per cell makes the structure exactly determinate. Extra
/// members are added in a fixed order until alpha_target is met: the second
/// diagonal of each cell ring by ring from the bottom, then a skip-one chord
/// ring by ring. Throws GeneratorError when the target is not reachable
/// within 0.02.
StructuralModel gen_cylinder(const GeneratorSpec& spec);

/// Double-layer offset grid (MERO type) of n x n cells supported at the four
/// bottom corners.
StructuralModel gen_mero(const GeneratorSpec& spec);

/// Hyperbolic-paraboloid beam grid of n x n cells, clamped along two
/// adjacent edges.
StructuralModel gen_hypar_frame(const GeneratorSpec& spec);

StructuralModel generate(const GeneratorSpec& spec);

/// Number of extra bracing members available to the cylinder of size n.
int cylinder_bracing_capacity(int n);

/// Scales E (and G) of every element by an independent factor drawn
/// uniformly from [1 - spread, 1 + spread]. The stream is std::mt19937_64
/// seeded with `seed`, mapped to [0,1) by its top 53 bits, one draw per
/// element in element order.
StructuralModel apply_stiffness_jitter(StructuralModel model, std::uint64_t seed, double spread = 0.5);

inline constexpr std::uint64_t kDefaultJitterSeed = 20230310;

} // namespace redmat
