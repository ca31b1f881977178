#pragma once

#include "redmat/assembly.hpp"
#include "redmat/model.hpp"

#include <string>
#include <vector>

namespace redmat {

struct InvariantCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
};

struct InvariantReport {
    ModelCounts counts;
    std::vector<InvariantCheck> checks;
    double trace = 0.0; // trace of the canonical R

    bool passed() const;
    const InvariantCheck* find(const std::string& name) const;
};

struct InvariantOptions {
    double tolerance = 1e-8;       // projector, oracle, eigenvector and bound checks
    double trace_tolerance = 1e-6;
    double rank_tau = 1e-8;        // relative singular-value cut for rank(R)
    double orthonormality_tolerance = 1e-10;
    int eigen_samples = 48;        // columns tested per eigenvalue, evenly spaced
    bool unit_invariance = true;   // only for the model overload
};

/// Dense desk-scale verification of a redundancy computation: both paths,
/// projector and trace identities, bounds, rank, eigenstructure, the
/// self-stress factorization and the pre-strain map. Throws
/// KinematicallyIndeterminate on mechanisms.
InvariantReport run_invariant_suite(const AssembledSystem& sys, const InvariantOptions& options = {});

/// As above plus the metre/millimetre invariance of diag(R).
InvariantReport run_invariant_suite(const StructuralModel& model, const InvariantOptions& options = {});

} // namespace redmat
