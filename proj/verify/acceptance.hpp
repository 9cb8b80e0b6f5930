#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace trd::acceptance {

struct Outcome {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

Outcome spectral_structure();
Outcome minor_recursion_identity();
Outcome derivative_closed_forms();
Outcome condition_soundness();
Outcome simulator_convergence();
Outcome invariance();
Outcome gronwall_and_blowup();
Outcome region_lattice();

/// Runs every criterion in order, printing one PASS/FAIL line each.
std::vector<Outcome> run_all(std::ostream& out);

/// "PASS [3] name: detail (0.12 s)"
std::string format(const Outcome& o);

}  // namespace trd::acceptance
