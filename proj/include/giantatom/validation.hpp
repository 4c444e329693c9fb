#pragma once

#include <string>
#include <vector>

#include "giantatom/config.hpp"

namespace giantatom {

struct CheckResult {
    std::string suite;
    std::string check;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Invariant suites evaluated at the configured parameter point: kernel
/// identity, spectral-matrix positivity, root residence, residue sums, lattice
/// agreement of BOC energies and early-time dynamics, Volterra convergence
/// order and the concurrence closed form.
std::vector<CheckResult> run_validation(const RunConfig& config);

}  // namespace giantatom
